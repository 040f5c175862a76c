#pragma once

#include <optional>

#include "afdm/types.hpp"

namespace afdm {

struct AfdmConfig {
  int n_sub = 128;
  int n_cpp = 32;
  double c1 = 1.0 / 32.0;
  double c2 = kPi - 3.0;
  double delta_f = 100e3;
  double f_c = 28e9;

  double t_s() const { return 1.0 / (n_sub * delta_f); }

  // 2*c1*Nc as an integer. Throws if c1 is not on that lattice.
  int k1() const;

  // Size and lattice checks. Does not look at any channel.
  void validate() const;

  // c1 range for (tau_m, nu_m) without the redundant Nc factor in the upper bound.
  bool c1_within_bounds(int tau_m, int nu_m) const;

  // Delay budget: the prefix must be strictly longer than the largest integer delay.
  void check_delay_budget(double max_delay) const;

  static AfdmConfig table1();
};

}  // namespace afdm
