#pragma once

#include <random>
#include <vector>

#include "afdm/channel.hpp"
#include "afdm/config.hpp"
#include "afdm/estimator.hpp"
#include "afdm/modem.hpp"
#include "afdm/types.hpp"

namespace afdm {

// ---- ambiguity function -------------------------------------------------

// sum_n a*[n] b[<n - tau>_N] exp(j2pi nu n/N). Delays are cyclic.
cd cross_ambiguity(const CVec& a, const CVec& b, int tau, int nu);
inline cd ambiguity(const CVec& s, int tau, int nu) { return cross_ambiguity(s, s, tau, nu); }

struct AmbiguitySurface {
  int tau_m = 0;   // delays -tau_m..tau_m
  int nu_span = 0; // Dopplers -nu_span..nu_span
  CMat chi;        // rows: tau + tau_m, cols: nu + nu_span
  CMat chi_p, chi_d, chi_dp, chi_pd;  // filled by the decomposition overload

  cd at(int tau, int nu) const { return chi(tau + tau_m, nu + nu_span); }
};

// Omega_A = [-tau_m, tau_m] x [-2 nu_m, 2 nu_m] for time signal s.
AmbiguitySurface ambiguity_function(const CVec& s, int tau_m, int nu_m);
// Pilot/data split of a DAFT frame: chi = chi_p + chi_d + chi_dp + chi_pd with
// chi_dp = cross(s_d, s_p) and chi_pd = cross(s_p, s_d).
AmbiguitySurface ambiguity_function(const CVec& x_p, const CVec& x_d, int tau_m, int nu_m,
                                    const AfdmConfig& cfg);

// Largest |chi| over Omega_A away from the origin.
double max_sidelobe(const CVec& s, int tau_m, int nu_m);
struct SidelobeAt {
  double value;
  int tau;
  int nu;
};
SidelobeAt max_sidelobe_where(const CVec& s, int tau_m, int nu_m, bool require_nonzero_doppler = false);

// <2 c1 tau Nc - nu>_Nc
int loc_offset(int tau, int nu, const AfdmConfig& cfg);

// Closed form: Nc exp(j2pi c2 (m2^2 - m1^2)) when <m2 - m1> = loc, else 0.
cd interference_coefficient(int m1, int m2, int tau, int nu, const AfdmConfig& cfg);

struct AfMoments {
  cd mean;
  double variance;
};
// Mean Pt at the origin and chi_p elsewhere; variance
// 2 sd^2 sp^2 + (E|x|^4 - sd^4) Nc at the origin, 2 sd^2 sp^2 + sd^4 Nc elsewhere.
AfMoments af_statistics_closed_form(const FrameSpec& spec, int n_sub, bool at_origin, cd chi_p = 0);

struct Theorem2Report {
  double var_qpsk_origin, var_qam_origin;
  double var_qpsk_off, var_qam_off;
  double mc_var_qpsk_origin = 0, mc_var_qam_origin = 0;
  bool holds;
};
Theorem2Report verify_theorem_2(const AfdmConfig& cfg, double pilot_power, double data_power_total,
                                int n_frames, std::mt19937_64& rng);

struct Theorem3Report {
  std::vector<int> n_sub;
  std::vector<double> closed_form_origin;
  std::vector<double> mc_origin;
  double slope_closed_form;
  double slope_mc;
};
// Origin variance for fixed sigma_p^2 and P_d = Nc sigma_d^2 over an Nc sweep.
Theorem3Report verify_theorem_3(const std::vector<int>& n_list, double pilot_power, double data_power_total,
                                int n_frames, std::mt19937_64& rng);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// ---- Fisher information and CRB ---------------------------------------------

// frac(2 c1 (n - tau) + m/Nc)
double fractional_kernel(int m, double n_minus_tau, const AfdmConfig& cfg);

// Parameter order (beta, tau, nu). beta is treated as a real amplitude |beta|.
RMat fim(const RVec& power, const SensingTarget& target, const AfdmConfig& cfg);

struct SensingBounds {
  RMat fim;
  double crb_tau = 0, crb_nu = 0;          // explicit delay/Doppler formulas
  double crb_tau_inverse = 0, crb_nu_inverse = 0;  // diagonal of the inverse FIM
  double crb_R = 0, crb_V = 0;
};
SensingBounds crb(const RVec& power, const SensingTarget& target, const AfdmConfig& cfg);

// d CRB_tau / d P_m at the equal allocation Pt/Nc, central difference with step 1e-4 Pt/Nc.
RVec sensing_weights(double total_power, const SensingTarget& target, const AfdmConfig& cfg);

struct CrbDistribution {
  std::vector<double> samples;
  double mean = 0, variance = 0;
  double tail_mass = 0;  // fraction above 2x the equal-allocation CRB
  double equal_allocation = 0;
};
// CRB_tau under Dirichlet(1) random allocations scaled to Pt.
CrbDistribution crb_distribution(double total_power, const SensingTarget& target, const AfdmConfig& cfg,
                                 int n_draws, std::mt19937_64& rng);

// ---- Gram / ambiguity link ----------------------------------------------------

struct Theorem4Report {
  double max_offdiag = 0;       // max |G_ij|, i != j
  double max_identity_error = 0; // max |G_ij - exp(-j2pi nu_j dtau/N) chi_p(dtau, dnu)|
  double max_diag_error = 0;     // max |G_ii - |x_p|^2|
};
// G_ij = x_p^H Phi_i^H Phi_j x_p over the basis grid.
Theorem4Report verify_theorem_4(const CVec& x_p, const BasisGrid& grid, const AfdmConfig& cfg);

}  // namespace afdm
