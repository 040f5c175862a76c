#pragma once

#include <vector>

#include "afdm/config.hpp"
#include "afdm/types.hpp"

namespace afdm {

// Axis points lo, lo + 1/os, ..., up to hi.
struct GridSpec {
  double tau_lo = 0, tau_hi = 0;
  int tau_os = 1;
  double nu_lo = 0, nu_hi = 0;
  int nu_os = 1;

  static GridSpec region(int tau_m, int nu_m, int tau_os = 1, int nu_os = 1);
};

struct RangeDopplerMap {
  std::vector<double> tau_axis;
  std::vector<double> nu_axis;
  CMat values;  // rows: tau, cols: nu

  RMat power() const { return values.cwiseAbs2(); }
};

// E(tau, nu) = sum_n r*[n] s[n - tau] exp(j2pi nu n/Nc); s is the transmit
// waveform of DAFT frame x, with the prefix record supplying n - tau < 0.
RangeDopplerMap rdf(const CVec& r, const CVec& x, const GridSpec& grid, const AfdmConfig& cfg);

struct NoiseWindow {
  int guard = 1;     // half-width of the excluded ring around the cell under test
  int half_tau = 2;  // averaging window half-widths
  int half_nu = 2;
};

// Local mean of |E|^2 over the window minus the guard block, cyclic at the edges.
RMat noise_floor(const RangeDopplerMap& map, const NoiseWindow& w);

struct Detection {
  double tau;
  double nu;
  double statistic;
  int row;
  int col;
};

// Cells with |E|^2 / N > gamma, strongest first.
std::vector<Detection> detect(const RangeDopplerMap& map, const RMat& noise, double gamma);

struct TargetEstimate {
  double tau;
  double nu;
  int row;
  int col;
};
// Argmax of |E| on the supplied grid.
TargetEstimate estimate_target(const RangeDopplerMap& map);

// Integer-grid search over [0,tau_m] x [-nu_m,nu_m] followed by a fine grid of
// +-1 cell around the coarse peak at the given oversampling factors.
TargetEstimate estimate_target_oversampled(const CVec& r, const CVec& x, int tau_m, int nu_m, int tau_os,
                                           int nu_os, const AfdmConfig& cfg);

// The fine map used by estimate_target_oversampled.
RangeDopplerMap fine_map(const CVec& r, const CVec& x, int tau_m, int nu_m, int tau_os, int nu_os,
                         const AfdmConfig& cfg);

// Three-point parabolic fit of |E| through the peak and its axis neighbours.
// Axes where the peak sits on the map edge are left unchanged.
TargetEstimate refine_peak(const RangeDopplerMap& map, const TargetEstimate& peak);

// Continuous local maximum of |E|^2 / |s(. - tau)|^2 (the single-target ML
// criterion with unknown gain) inside [tau +- tau_half] x [nu +- nu_half]
// around a grid peak: golden-section over nu nested in golden-section over tau.
// tau is clamped to [0, tau_max].
TargetEstimate local_peak_search(const CVec& r, const CVec& x, const TargetEstimate& start, double tau_half,
                                 double nu_half, double tau_max, const AfdmConfig& cfg);

struct RocTrial {
  double peak_statistic = 0;   // statistic at the strongest cell
  bool peak_on_target = false; // strongest cell within 1 of the true delay and Doppler
  std::vector<double> clutter; // statistics of cells away from the target
};

struct RocPoint {
  double gamma;
  double pfa;
  double pd;
};

// Pd: peak above gamma and on target. Pfa: fraction of off-target cells above gamma.
std::vector<RocPoint> roc_curve(const std::vector<RocTrial>& trials, const std::vector<double>& gamma_grid);

// Pd at the requested false-alarm levels, taking for each level the largest
// Pd among thresholds whose Pfa does not exceed it.
std::vector<double> pd_at_pfa(const std::vector<RocPoint>& curve, const std::vector<double>& pfa_levels);

RocTrial roc_trial_stats(const RangeDopplerMap& map, const NoiseWindow& w, double true_tau, double true_nu);

}  // namespace afdm
