#pragma once

#include <random>
#include <vector>

#include "afdm/config.hpp"
#include "afdm/types.hpp"

namespace afdm {

struct ChannelPath {
  cd gain{1.0, 0.0};
  int delay = 0;        // samples
  double doppler = 0;   // subcarrier spacings
};

struct ChannelRealization {
  std::vector<ChannelPath> paths;
  double noise_power_comm = 0;  // sigma_cn^2
  int tau_m = 0;
  int nu_m = 0;
};

struct SensingTarget {
  cd gain{1.0, 0.0};     // beta
  double delay = 0;      // tau-bar, samples, may be fractional
  double doppler = 0;    // nu-bar
  double noise_power = 0;  // sigma_s^2
};

// Unit-gain DAFT-domain operator Phi = A Gamma Pi^tau Delta_nu A^H for integer
// (tau, nu) on the 2c1Nc lattice. Each column has one nonzero entry:
// Phi[p, q] with p = <q - loc>, loc = 2 c1 Nc tau - nu.
class PathOperator {
 public:
  PathOperator(int tau, int nu, const AfdmConfig& cfg);
  int tau() const { return tau_; }
  int nu() const { return nu_; }
  int loc() const { return loc_; }
  int size() const { return n_; }
  CVec apply(const CVec& x) const;
  // y += a * Phi x
  void accumulate(const CVec& x, cd a, CVec& y) const;
  CVec apply_adjoint(const CVec& y) const;
  CMat dense() const;
  // row index receiving column q, and the coefficient
  int row_of(int q) const { return pos_mod(q - loc_, n_); }
  cd coef(int q) const { return coef_[q]; }

 private:
  int tau_, nu_, loc_, n_;
  std::vector<cd> coef_;  // indexed by column
};

// alpha * A Gamma Pi^tau Delta_nu A^H assembled from dense factors.
CMat effective_channel_matrix(const ChannelPath& path, const AfdmConfig& cfg);
// Sum over paths, dense.
CMat effective_channel(const ChannelRealization& ch, const AfdmConfig& cfg);
// Same operator applied through the transforms; fractional Doppler allowed.
CVec apply_path_transform(const ChannelPath& path, const CVec& x, const AfdmConfig& cfg);

// y[n] = sum_i alpha_i s_cpp[n - tau_i] exp(j2pi nu_i (n - tau_i)/Nc) + w[n] over the
// whole prefixed record; samples before the record start are zero.
CVec apply_channel_time(const CVec& s_cpp, const ChannelRealization& ch, const AfdmConfig& cfg,
                        std::mt19937_64* rng);

// L distinct integer (tau, nu) pairs on [0,tau_m] x [-nu_m,nu_m], gains CN(0, 1/L).
ChannelRealization sample_channel(int L, int tau_m, int nu_m, double noise_power,
                                  std::mt19937_64& rng);

// r[n] = beta s(n - tau) exp(j2pi nu n/Nc) + w[n], n = 0..Nc-1, for the DAFT frame x.
// Integer delays use the prefix record, fractional ones the wrapped chirp model.
CVec sensing_echo(const CVec& x, const SensingTarget& target, const AfdmConfig& cfg,
                  std::mt19937_64* rng);

struct RangeVelocity {
  double range;
  double velocity;
};
RangeVelocity delay_doppler_to_range_velocity(double tau_hat, double nu_hat, const AfdmConfig& cfg);

// Circularly symmetric complex Gaussian samples with the given variance.
CVec complex_noise(Eigen::Index n, double variance, std::mt19937_64& rng);

}  // namespace afdm
