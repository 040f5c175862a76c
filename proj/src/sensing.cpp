#include "afdm/sensing.hpp"

#include <algorithm>
#include <cmath>

#include "afdm/daft.hpp"

namespace afdm {

namespace {

std::vector<double> axis(double lo, double hi, int os) {
  if (os < 1) throw ConfigError("oversampling factor must be at least 1");
  if (hi < lo) throw ConfigError("axis upper bound below lower bound");
  std::vector<double> a;
  const long long count = static_cast<long long>(std::floor((hi - lo) * os + 1e-9)) + 1;
  for (long long k = 0; k < count; ++k) a.push_back(lo + static_cast<double>(k) / os);
  return a;
}

}  // namespace

GridSpec GridSpec::region(int tau_m, int nu_m, int tau_os, int nu_os) {
  GridSpec g;
  g.tau_lo = 0;
  g.tau_hi = tau_m;
  g.tau_os = tau_os;
  g.nu_lo = -nu_m;
  g.nu_hi = nu_m;
  g.nu_os = nu_os;
  return g;
}

RangeDopplerMap rdf(const CVec& r, const CVec& x, const GridSpec& grid, const AfdmConfig& cfg) {
  const int n = cfg.n_sub;
  if (r.size() != n || x.size() != n) throw ConfigError("rdf: signals must have length n_sub");
  RangeDopplerMap map;
  map.tau_axis = axis(grid.tau_lo, grid.tau_hi, grid.tau_os);
  map.nu_axis = axis(grid.nu_lo, grid.nu_hi, grid.nu_os);
  map.values.resize(map.tau_axis.size(), map.nu_axis.size());
  const CVec rc = r.conjugate();
  for (std::size_t i = 0; i < map.tau_axis.size(); ++i) {
    CVec u = rc.cwiseProduct(delayed_waveform(x, cfg, map.tau_axis[i]));
    for (std::size_t j = 0; j < map.nu_axis.size(); ++j) {
      const double nu = map.nu_axis[j];
      cd acc = 0;
      for (int k = 0; k < n; ++k) {
        // exact phase reduction keeps integer Doppler bins exact
        double ph = nu * k / n;
        acc += u[k] * cis(ph - std::floor(ph));
      }
      map.values(i, j) = acc;
    }
  }
  return map;
}

RMat noise_floor(const RangeDopplerMap& map, const NoiseWindow& w) {
  const int rows = static_cast<int>(map.values.rows()), cols = static_cast<int>(map.values.cols());
  if (w.guard < 0 || w.half_tau < 0 || w.half_nu < 0) throw ConfigError("window sizes must be non-negative");
  if (2 * w.half_tau + 1 > rows || 2 * w.half_nu + 1 > cols)
    throw ConfigError("noise window larger than the grid");
  if (w.guard >= w.half_tau && w.guard >= w.half_nu)
    throw ConfigError("guard ring covers the whole noise window");
  RMat p = map.power();
  RMat out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      double acc = 0;
      int cnt = 0;
      for (int di = -w.half_tau; di <= w.half_tau; ++di)
        for (int dj = -w.half_nu; dj <= w.half_nu; ++dj) {
          if (std::abs(di) <= w.guard && std::abs(dj) <= w.guard) continue;
          acc += p(pos_mod(i + di, rows), pos_mod(j + dj, cols));
          ++cnt;
        }
      out(i, j) = acc / cnt;
    }
  return out;
}

std::vector<Detection> detect(const RangeDopplerMap& map, const RMat& noise, double gamma) {
  if (noise.rows() != map.values.rows() || noise.cols() != map.values.cols())
    throw ConfigError("detect: noise grid shape differs from map");
  std::vector<Detection> out;
  RMat p = map.power();
  for (int i = 0; i < p.rows(); ++i)
    for (int j = 0; j < p.cols(); ++j) {
      double st = p(i, j) / noise(i, j);
      if (st > gamma) out.push_back({map.tau_axis[i], map.nu_axis[j], st, i, j});
    }
  std::stable_sort(out.begin(), out.end(),
                   [](const Detection& a, const Detection& b) { return a.statistic > b.statistic; });
  return out;
}

TargetEstimate estimate_target(const RangeDopplerMap& map) {
  if (map.values.size() == 0) throw ConfigError("estimate_target: empty map");
  Eigen::Index bi = 0, bj = 0;
  map.values.cwiseAbs2().maxCoeff(&bi, &bj);
  return {map.tau_axis[bi], map.nu_axis[bj], static_cast<int>(bi), static_cast<int>(bj)};
}

RangeDopplerMap fine_map(const CVec& r, const CVec& x, int tau_m, int nu_m, int tau_os, int nu_os,
                         const AfdmConfig& cfg) {
  auto coarse = estimate_target(rdf(r, x, GridSpec::region(tau_m, nu_m), cfg));
  GridSpec g;
  g.tau_lo = std::max(0.0, coarse.tau - 1);
  g.tau_hi = std::min(static_cast<double>(tau_m), coarse.tau + 1);
  g.tau_os = tau_os;
  g.nu_lo = std::max(static_cast<double>(-nu_m), coarse.nu - 1);
  g.nu_hi = std::min(static_cast<double>(nu_m), coarse.nu + 1);
  g.nu_os = nu_os;
  return rdf(r, x, g, cfg);
}

TargetEstimate estimate_target_oversampled(const CVec& r, const CVec& x, int tau_m, int nu_m, int tau_os,
                                           int nu_os, const AfdmConfig& cfg) {
  return estimate_target(fine_map(r, x, tau_m, nu_m, tau_os, nu_os, cfg));
}

namespace {

// vertex offset of the parabola through (-1,a), (0,b), (1,c), in cells
double vertex_offset(double a, double b, double c) {
  double den = a - 2 * b + c;
  if (!(den < 0)) return 0;
  double d = 0.5 * (a - c) / den;
  return std::clamp(d, -0.5, 0.5);
}

}  // namespace

TargetEstimate refine_peak(const RangeDopplerMap& map, const TargetEstimate& peak) {
  TargetEstimate out = peak;
  const auto& v = map.values;
  const int i = peak.row, j = peak.col;
  if (i > 0 && i + 1 < v.rows()) {
    double d = vertex_offset(std::abs(v(i - 1, j)), std::abs(v(i, j)), std::abs(v(i + 1, j)));
    out.tau += d * (map.tau_axis[i + 1] - map.tau_axis[i]);
  }
  if (j > 0 && j + 1 < v.cols()) {
    double d = vertex_offset(std::abs(v(i, j - 1)), std::abs(v(i, j)), std::abs(v(i, j + 1)));
    out.nu += d * (map.nu_axis[j + 1] - map.nu_axis[j]);
  }
  return out;
}

namespace {

// maximiser of f on [a, b], fixed iteration count
template <class F>
double golden_max(F&& f, double a, double b, int iters, double* fbest) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int k = 0; k < iters; ++k) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  double x = fc >= fd ? c : d;
  if (fbest) *fbest = std::max(fc, fd);
  return x;
}

cd doppler_sum(const CVec& u, double nu) {
  const int n = static_cast<int>(u.size());
  cd acc = 0;
  for (int k = 0; k < n; ++k) {
    double ph = nu * k / n;
    acc += u[k] * cis(ph - std::floor(ph));
  }
  return acc;
}

}  // namespace

TargetEstimate local_peak_search(const CVec& r, const CVec& x, const TargetEstimate& start, double tau_half,
                                 double nu_half, double tau_max, const AfdmConfig& cfg) {
  const CVec rc = r.conjugate();
  const int iters = 28;
  double best_nu = start.nu;
  auto over_tau = [&](double tau) {
    CVec ref = delayed_waveform(x, cfg, tau);
    const double e = ref.squaredNorm();
    CVec u = rc.cwiseProduct(ref);
    double fb = 0;
    double nu = golden_max([&](double v) { return std::norm(doppler_sum(u, v)); }, start.nu - nu_half,
                           start.nu + nu_half, iters, &fb);
    best_nu = nu;
    return fb / e;
  };
  double lo = std::max(0.0, start.tau - tau_half), hi = std::min(tau_max, start.tau + tau_half);
  TargetEstimate out = start;
  if (hi > lo) {
    out.tau = golden_max(over_tau, lo, hi, iters, nullptr);
  }
  over_tau(out.tau);
  out.nu = best_nu;
  return out;
}

RocTrial roc_trial_stats(const RangeDopplerMap& map, const NoiseWindow& w, double true_tau, double true_nu) {
  RMat noise = noise_floor(map, w);
  RMat p = map.power();
  RocTrial t;
  t.peak_statistic = -1;
  for (int i = 0; i < p.rows(); ++i)
    for (int j = 0; j < p.cols(); ++j) {
      double st = p(i, j) / noise(i, j);
      bool near = std::abs(map.tau_axis[i] - true_tau) <= 1 && std::abs(map.nu_axis[j] - true_nu) <= 1;
      if (!near) t.clutter.push_back(st);
      if (st > t.peak_statistic) {
        t.peak_statistic = st;
        t.peak_on_target = near;
      }
    }
  return t;
}

std::vector<RocPoint> roc_curve(const std::vector<RocTrial>& trials, const std::vector<double>& gamma_grid) {
  std::vector<double> clutter;
  for (const auto& t : trials) clutter.insert(clutter.end(), t.clutter.begin(), t.clutter.end());
  std::sort(clutter.begin(), clutter.end());
  std::vector<double> hits;
  for (const auto& t : trials)
    if (t.peak_on_target) hits.push_back(t.peak_statistic);
  std::sort(hits.begin(), hits.end());
  std::vector<double> g = gamma_grid;
  std::sort(g.begin(), g.end());
  std::vector<RocPoint> out;
  for (double gamma : g) {
    auto above = [gamma](const std::vector<double>& v) {
      return static_cast<double>(v.end() - std::upper_bound(v.begin(), v.end(), gamma));
    };
    double pfa = clutter.empty() ? 0.0 : above(clutter) / clutter.size();
    double pd = trials.empty() ? 0.0 : above(hits) / trials.size();
    out.push_back({gamma, pfa, pd});
  }
  return out;
}

std::vector<double> pd_at_pfa(const std::vector<RocPoint>& curve, const std::vector<double>& pfa_levels) {
  std::vector<double> out;
  for (double level : pfa_levels) {
    double best = 0;
    for (const auto& pt : curve)
      if (pt.pfa <= level) best = std::max(best, pt.pd);
    out.push_back(best);
  }
  return out;
}

}  // namespace afdm
