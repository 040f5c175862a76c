#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "afdm/channel.hpp"
#include "afdm/config.hpp"
#include "afdm/modem.hpp"
#include "afdm/types.hpp"

namespace afdm {

// Integer delay-Doppler basis, i = 1..L_m (stored 0-based):
// tau_i = floor((i-1)/(2 nu_m + 1)), nu_i = <i-1>_{2 nu_m + 1} - nu_m.
struct BasisGrid {
  int tau_m = 0;
  int nu_m = 0;
  std::vector<std::pair<int, int>> taps;

  static BasisGrid make(int tau_m, int nu_m);
  int size() const { return static_cast<int>(taps.size()); }
  // index of (tau, nu) in taps, -1 when off the grid
  int index_of(int tau, int nu) const;
};

std::vector<PathOperator> basis_operators(const BasisGrid& grid, const AfdmConfig& cfg);

// Column i = Phi_i x.
CMat build_psi(const CVec& x, const BasisGrid& grid, const AfdmConfig& cfg);
CMat build_psi(const CVec& x, const std::vector<PathOperator>& ops);

struct PriorModel {
  RVec c_alpha;          // diagonal of C_alpha; +inf means no prior, 0 pins the tap to zero
  double noise_var = 0;  // C_w = noise_var * I
};

// C_w = (sigma_d^2 sum_i sigma_alpha_i^2 + sigma_cn^2) I, returned as the scalar.
double effective_noise_variance(const RVec& c_alpha, double sigma_d2, double sigma_cn2);

struct MmseSolution {
  CVec alpha_hat;
  RVec posterior_var;  // diagonal of the posterior covariance
  double rcond = 0;
};

// alpha = (Psi^H Psi + s2 C_alpha^-1)^-1 Psi^H y, the scalar-noise form of the MMSE estimate.
MmseSolution mmse_solve(const CVec& y, const CMat& psi, const PriorModel& prior);
CVec mmse_estimate(const CVec& y, const CMat& psi, const PriorModel& prior);

// Caches Psi^H Psi for repeated solves against the same pilot.
class MmseEstimator {
 public:
  MmseEstimator(CMat psi, RVec c_alpha);
  MmseSolution solve(const CVec& y, double noise_var) const;
  // Same Psi with a different prior diagonal.
  MmseSolution solve(const CVec& y, double noise_var, const RVec& c_alpha) const;
  const CMat& psi() const { return psi_; }
  const CMat& gram() const { return gram_; }
  const RVec& c_alpha() const { return c_alpha_; }

 private:
  CMat psi_;
  CMat gram_;
  RVec c_alpha_;
};

// b_i = 1 iff |alpha_i| > eps.
std::vector<uint8_t> threshold_paths(const CVec& alpha_hat, double eps);
std::vector<uint8_t> threshold_paths(const CVec& alpha_hat, const RVec& eps);

CMat reconstruct_channel(const CVec& alpha_hat, const std::vector<uint8_t>& b, const BasisGrid& grid,
                         const AfdmConfig& cfg);
CMat reconstruct_channel(const CVec& alpha_hat, const std::vector<uint8_t>& b,
                         const std::vector<PathOperator>& ops);

struct Equalized {
  CVec symbols;
  std::vector<uint8_t> bits;
};

// x_d = (H^H H + (sigma_cn^2/sigma_d^2) I)^-1 H^H (y - H x_p), then hard decisions.
Equalized equalize_demod(const CVec& y, const CMat& h_hat, const CVec& x_pilot, const FrameSpec& spec,
                         double noise_var);

// Frobenius norm of the difference.
double channel_mse(const CMat& h_true, const CMat& h_hat);

struct IterativeOptions {
  int n_iter = 2;
  double eps_factor = 3.0;  // eps_i = eps_factor * posterior std of tap i
  double eps_override = -1; // >= 0 replaces the posterior rule with a fixed threshold
  // Re-estimation prior: spread the prior power over the detected taps and pin
  // the rest to zero, instead of reusing the full-grid prior.
  bool restrict_support = false;
};

struct IterationRecord {
  CVec alpha_hat;
  std::vector<uint8_t> indicator;
  double noise_var_model = 0;
  double residual_norm = 0;
  double mse = -1;          // Frobenius error when the true channel is supplied
  std::size_t bit_errors = 0;
};

struct EstimationResult {
  CVec alpha_hat;
  std::vector<uint8_t> indicator;
  CMat h_eff_hat;
  double mse = -1;
  Equalized data;
  std::vector<IterationRecord> iterations;
  bool monotone = true;  // residual norm non-increasing over iterations
};

// Pilot-based MMSE estimate, equalization, and re-estimation from
// y - H_hat x_d_hat. Iteration 1 is the plain MMSE path.
EstimationResult iterative_estimate(const CVec& y, const CVec& x_pilot, const MmseEstimator& est,
                                    const std::vector<PathOperator>& ops, const FrameSpec& spec,
                                    double noise_var_comm, const IterativeOptions& opt,
                                    const CMat* h_true = nullptr,
                                    const std::vector<uint8_t>* true_bits = nullptr);

// One refinement step with known data and channel: estimate alpha from
// y - H x_d using the supplied residual noise variance.
CVec refine_with_known_data(const CVec& y, const CVec& x_data, const CMat& h, const MmseEstimator& est,
                            double noise_var);

}  // namespace afdm
