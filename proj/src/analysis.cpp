#include "afdm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "afdm/daft.hpp"
#include "afdm/pilots.hpp"

namespace afdm {

cd cross_ambiguity(const CVec& a, const CVec& b, int tau, int nu) {
  const int n = static_cast<int>(a.size());
  if (b.size() != n) throw ConfigError("cross_ambiguity: length mismatch");
  cd acc = 0;
  for (int k = 0; k < n; ++k)
    acc += std::conj(a[k]) * b[pos_mod(k - tau, n)] * cis(static_cast<double>(pos_mod(1LL * nu * k, n)) / n);
  return acc;
}

AmbiguitySurface ambiguity_function(const CVec& s, int tau_m, int nu_m) {
  AmbiguitySurface a;
  a.tau_m = tau_m;
  a.nu_span = 2 * nu_m;
  a.chi.resize(2 * tau_m + 1, 2 * a.nu_span + 1);
  for (int t = -tau_m; t <= tau_m; ++t)
    for (int v = -a.nu_span; v <= a.nu_span; ++v) a.chi(t + tau_m, v + a.nu_span) = ambiguity(s, t, v);
  return a;
}

AmbiguitySurface ambiguity_function(const CVec& x_p, const CVec& x_d, int tau_m, int nu_m,
                                    const AfdmConfig& cfg) {
  const CVec sp = idaft(x_p, cfg), sd = idaft(x_d, cfg);
  AmbiguitySurface a = ambiguity_function(CVec(sp + sd), tau_m, nu_m);
  const Eigen::Index r = a.chi.rows(), c = a.chi.cols();
  a.chi_p.resize(r, c);
  a.chi_d.resize(r, c);
  a.chi_dp.resize(r, c);
  a.chi_pd.resize(r, c);
  for (int t = -tau_m; t <= tau_m; ++t)
    for (int v = -a.nu_span; v <= a.nu_span; ++v) {
      a.chi_p(t + tau_m, v + a.nu_span) = cross_ambiguity(sp, sp, t, v);
      a.chi_d(t + tau_m, v + a.nu_span) = cross_ambiguity(sd, sd, t, v);
      a.chi_dp(t + tau_m, v + a.nu_span) = cross_ambiguity(sd, sp, t, v);
      a.chi_pd(t + tau_m, v + a.nu_span) = cross_ambiguity(sp, sd, t, v);
    }
  return a;
}

SidelobeAt max_sidelobe_where(const CVec& s, int tau_m, int nu_m, bool require_nonzero_doppler) {
  SidelobeAt best{0.0, 0, 0};
  for (int t = -tau_m; t <= tau_m; ++t)
    for (int v = -2 * nu_m; v <= 2 * nu_m; ++v) {
      if (t == 0 && v == 0) continue;
      if (require_nonzero_doppler && v == 0) continue;
      double m = std::abs(ambiguity(s, t, v));
      if (m > best.value) best = {m, t, v};
    }
  return best;
}

double max_sidelobe(const CVec& s, int tau_m, int nu_m) { return max_sidelobe_where(s, tau_m, nu_m).value; }

int loc_offset(int tau, int nu, const AfdmConfig& cfg) {
  return pos_mod(static_cast<long long>(cfg.k1()) * tau - nu, cfg.n_sub);
}

cd interference_coefficient(int m1, int m2, int tau, int nu, const AfdmConfig& cfg) {
  if (pos_mod(m2 - m1, cfg.n_sub) != loc_offset(tau, nu, cfg)) return 0.0;
  return static_cast<double>(cfg.n_sub) * cis(c2_phase(cfg, m2) - c2_phase(cfg, m1));
}

AfMoments af_statistics_closed_form(const FrameSpec& spec, int n_sub, bool at_origin, cd chi_p) {
  if (spec.constellation == Constellation::BPSK)
    throw ParameterError("BPSK violates the zero pseudo-variance assumption (E{x^2} != 0)");
  const double sd2 = spec.data_symbol_power, sp2 = spec.pilot_power;
  const double m4 = fourth_moment(spec.constellation) * sd2 * sd2;
  AfMoments out;
  if (at_origin) {
    out.mean = spec.total_power(n_sub);
    out.variance = 2 * sd2 * sp2 + (m4 - sd2 * sd2) * n_sub;
  } else {
    out.mean = chi_p;
    out.variance = 2 * sd2 * sp2 + sd2 * sd2 * n_sub;
  }
  return out;
}

namespace {

double sample_variance(const std::vector<double>& v) {
  double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double acc = 0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / (v.size() - 1);
}

// Origin of the AF is the frame energy.
double mc_origin_variance(const CVec& x_p, const FrameSpec& spec, int n_frames, std::mt19937_64& rng) {
  std::vector<double> e(n_frames);
  const int n = static_cast<int>(x_p.size());
  for (int f = 0; f < n_frames; ++f) e[f] = (x_p + random_symbols(n, spec, rng)).squaredNorm();
  return sample_variance(e);
}

}  // namespace

Theorem2Report verify_theorem_2(const AfdmConfig& cfg, double pilot_power, double data_power_total,
                                int n_frames, std::mt19937_64& rng) {
  FrameSpec q{pilot_power, data_power_total / cfg.n_sub, Constellation::QPSK};
  FrameSpec a = q;
  a.constellation = Constellation::QAM16;
  Theorem2Report r{};
  r.var_qpsk_origin = af_statistics_closed_form(q, cfg.n_sub, true).variance;
  r.var_qam_origin = af_statistics_closed_form(a, cfg.n_sub, true).variance;
  r.var_qpsk_off = af_statistics_closed_form(q, cfg.n_sub, false).variance;
  r.var_qam_off = af_statistics_closed_form(a, cfg.n_sub, false).variance;
  if (n_frames > 1) {
    CVec xp = single_pilot(cfg, pilot_power);
    r.mc_var_qpsk_origin = mc_origin_variance(xp, q, n_frames, rng);
    r.mc_var_qam_origin = mc_origin_variance(xp, a, n_frames, rng);
  }
  r.holds = r.var_qpsk_origin <= r.var_qam_origin && r.var_qpsk_off <= r.var_qam_off &&
            (n_frames <= 1 || r.mc_var_qpsk_origin <= r.mc_var_qam_origin);
  return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw ConfigError("loglog_slope needs at least two matched points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

Theorem3Report verify_theorem_3(const std::vector<int>& n_list, double pilot_power, double data_power_total,
                                int n_frames, std::mt19937_64& rng) {
  Theorem3Report r;
  std::vector<double> xs;
  for (int n : n_list) {
    AfdmConfig cfg;
    cfg.n_sub = n;
    cfg.n_cpp = std::min(n - 1, 32);
    cfg.c1 = select_c1_q(2, cfg).c1;
    FrameSpec q{pilot_power, data_power_total / n, Constellation::QPSK};
    r.n_sub.push_back(n);
    xs.push_back(n);
    r.closed_form_origin.push_back(af_statistics_closed_form(q, n, true).variance);
    if (n_frames > 1) r.mc_origin.push_back(mc_origin_variance(proposed_pilot(cfg, 2, 0, pilot_power), q, n_frames, rng));
  }
  r.slope_closed_form = loglog_slope(xs, r.closed_form_origin);
  r.slope_mc = r.mc_origin.empty() ? 0.0 : loglog_slope(xs, r.mc_origin);
  return r;
}

double fractional_kernel(int m, double n_minus_tau, const AfdmConfig& cfg) {
  const long double v = 2.0L * cfg.c1 * n_minus_tau + static_cast<long double>(m) / cfg.n_sub;
  return static_cast<double>(v - std::floor(v));
}

namespace {

struct KernelSums {
  double s;  // sum P_m F^2
  double t;  // sum P_m F (n/N)
  double u;  // sum P_m (n/N)^2
};

KernelSums kernel_sums(const RVec& power, double tau, const AfdmConfig& cfg) {
  const int n = cfg.n_sub;
  if (power.size() != n) throw ConfigError("power allocation length must equal n_sub");
  KernelSums k{0, 0, 0};
  const double pt = power.sum();
  for (int i = 0; i < n; ++i) {
    const double nn = static_cast<double>(i) / n;
    double s = 0, t = 0;
    for (int m = 0; m < n; ++m) {
      const double f = fractional_kernel(m, i - tau, cfg);
      s += power[m] * f * f;
      t += power[m] * f;
    }
    k.s += s;
    k.t += t * nn;
    k.u += pt * nn * nn;
  }
  return k;
}

}  // namespace

RMat fim(const RVec& power, const SensingTarget& target, const AfdmConfig& cfg) {
  if (!(target.noise_power > 0)) throw ConfigError("sensing noise power must be positive");
  if ((power.array() < 0).any()) throw ConfigError("power allocation must be non-negative");
  const KernelSums k = kernel_sums(power, target.delay, cfg);
  const double b2 = std::norm(target.gain);
  const double g = 2.0 / target.noise_power;
  const double kap = g * b2 * kTwoPi * kTwoPi / cfg.n_sub;
  RMat f = RMat::Zero(3, 3);
  f(0, 0) = g * power.sum();
  f(1, 1) = kap * k.s;
  f(1, 2) = f(2, 1) = -kap * k.t;
  f(2, 2) = kap * k.u;
  return f;
}

SensingBounds crb(const RVec& power, const SensingTarget& target, const AfdmConfig& cfg) {
  SensingBounds b;
  b.fim = fim(power, target, cfg);
  const KernelSums k = kernel_sums(power, target.delay, cfg);
  const double det = k.s * k.u - k.t * k.t;
  const double scale = target.noise_power * cfg.n_sub / (8 * kPi * kPi * std::norm(target.gain));
  if (!(det > 1e-14 * std::max(k.s * k.u, 1e-300)))
    throw NumericalError("delay-Doppler FIM block is singular");
  b.crb_tau = scale * k.u / det;
  b.crb_nu = scale * k.s / det;
  Eigen::FullPivLU<RMat> lu(b.fim);
  if (!lu.isInvertible()) throw NumericalError("FIM is singular");
  RMat inv = lu.inverse();
  b.crb_tau_inverse = inv(1, 1);
  b.crb_nu_inverse = inv(2, 2);
  const double r_scale = kSpeedOfLight * cfg.t_s() / 2;
  const double v_scale = kSpeedOfLight * cfg.delta_f / (2 * cfg.f_c);
  b.crb_R = r_scale * r_scale * b.crb_tau;
  b.crb_V = v_scale * v_scale * b.crb_nu;
  return b;
}

RVec sensing_weights(double total_power, const SensingTarget& target, const AfdmConfig& cfg) {
  const int n = cfg.n_sub;
  const double p0 = total_power / n;
  const double h = 1e-4 * p0;
  RVec w(n);
  RVec p = RVec::Constant(n, p0);
  for (int m = 0; m < n; ++m) {
    p[m] = p0 + h;
    double up = crb(p, target, cfg).crb_tau;
    p[m] = p0 - h;
    double dn = crb(p, target, cfg).crb_tau;
    p[m] = p0;
    w[m] = (up - dn) / (2 * h);
  }
  return w;
}

CrbDistribution crb_distribution(double total_power, const SensingTarget& target, const AfdmConfig& cfg,
                                 int n_draws, std::mt19937_64& rng) {
  const int n = cfg.n_sub;
  CrbDistribution d;
  d.equal_allocation = crb(RVec::Constant(n, total_power / n), target, cfg).crb_tau;
  std::exponential_distribution<double> ex(1.0);
  RVec p(n);
  for (int k = 0; k < n_draws; ++k) {
    for (int m = 0; m < n; ++m) p[m] = ex(rng);
    p *= total_power / p.sum();
    d.samples.push_back(crb(p, target, cfg).crb_tau);
  }
  if (!d.samples.empty()) {
    d.mean = std::accumulate(d.samples.begin(), d.samples.end(), 0.0) / d.samples.size();
    d.variance = d.samples.size() > 1 ? sample_variance(d.samples) : 0.0;
    d.tail_mass = static_cast<double>(std::count_if(d.samples.begin(), d.samples.end(),
                                                    [&](double v) { return v > 2 * d.equal_allocation; })) /
                  d.samples.size();
  }
  return d;
}

Theorem4Report verify_theorem_4(const CVec& x_p, const BasisGrid& grid, const AfdmConfig& cfg) {
  const int n = cfg.n_sub;
  CMat psi = build_psi(x_p, grid, cfg);
  CMat g = psi.adjoint() * psi;
  const CVec s = idaft(x_p, cfg);
  const double e = x_p.squaredNorm();
  Theorem4Report r;
  for (int i = 0; i < grid.size(); ++i)
    for (int j = 0; j < grid.size(); ++j) {
      if (i == j) {
        r.max_diag_error = std::max(r.max_diag_error, std::abs(g(i, i) - e));
        continue;
      }
      r.max_offdiag = std::max(r.max_offdiag, std::abs(g(i, j)));
      const int dt = grid.taps[j].first - grid.taps[i].first;
      const int dv = grid.taps[j].second - grid.taps[i].second;
      const int nj = grid.taps[j].second;
      cd pred = std::conj(cis(static_cast<double>(pos_mod(1LL * nj * dt, n)) / n)) * ambiguity(s, dt, dv);
      r.max_identity_error = std::max(r.max_identity_error, std::abs(g(i, j) - pred));
    }
  return r;
}

}  // namespace afdm
