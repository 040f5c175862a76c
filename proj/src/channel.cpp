#include "afdm/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "afdm/daft.hpp"

namespace afdm {

PathOperator::PathOperator(int tau, int nu, const AfdmConfig& cfg)
    : tau_(tau), nu_(nu), n_(cfg.n_sub), coef_(cfg.n_sub) {
  const int k = cfg.k1();
  loc_ = pos_mod(static_cast<long long>(k) * tau - nu, n_);
  const double base = c1_phase(cfg, tau);
  for (int q = 0; q < n_; ++q) {
    const int p = row_of(q);
    double ph = c2_phase(cfg, q) - c2_phase(cfg, p) + base -
                static_cast<double>(pos_mod(static_cast<long long>(q + nu) * tau, n_)) / n_;
    coef_[q] = cis(ph);
  }
}

CVec PathOperator::apply(const CVec& x) const {
  CVec y(n_);
  for (int q = 0; q < n_; ++q) y[row_of(q)] = coef_[q] * x[q];
  return y;
}

void PathOperator::accumulate(const CVec& x, cd a, CVec& y) const {
  for (int q = 0; q < n_; ++q) y[row_of(q)] += a * coef_[q] * x[q];
}

CVec PathOperator::apply_adjoint(const CVec& y) const {
  CVec x(n_);
  for (int q = 0; q < n_; ++q) x[q] = std::conj(coef_[q]) * y[row_of(q)];
  return x;
}

CMat PathOperator::dense() const {
  CMat m = CMat::Zero(n_, n_);
  for (int q = 0; q < n_; ++q) m(row_of(q), q) = coef_[q];
  return m;
}

CMat effective_channel_matrix(const ChannelPath& path, const AfdmConfig& cfg) {
  const int n = cfg.n_sub;
  if (path.delay < 0 || path.delay >= n) throw ConfigError("path delay out of range");
  CMat a = build_daft_matrix(cfg);
  Eigen::VectorXcd gamma(n), delta(n);
  for (int i = 0; i < n; ++i) {
    // Gamma_CPP: exp(-j2pi c1 (N^2 + 2N(i - tau))) for i < tau
    if (i < path.delay) {
      long double ph = static_cast<long double>(cfg.c1) *
                       (static_cast<long double>(n) * n + 2.0L * n * (i - path.delay));
      gamma[i] = std::conj(cis(static_cast<double>(ph - std::floor(ph))));
    } else {
      gamma[i] = 1.0;
    }
    delta[i] = cis(path.doppler * i / n);
  }
  CMat pi = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i) pi(pos_mod(i + path.delay, n), i) = 1.0;
  return path.gain * (a * gamma.asDiagonal() * pi * delta.asDiagonal() * a.adjoint());
}

CMat effective_channel(const ChannelRealization& ch, const AfdmConfig& cfg) {
  CMat h = CMat::Zero(cfg.n_sub, cfg.n_sub);
  for (const auto& p : ch.paths) h += effective_channel_matrix(p, cfg);
  return h;
}

CVec apply_path_transform(const ChannelPath& path, const CVec& x, const AfdmConfig& cfg) {
  const int n = cfg.n_sub;
  CVec s = idaft(x, cfg);
  CVec v(n);
  for (int i = 0; i < n; ++i) {
    int src = pos_mod(i - path.delay, n);
    cd val = s[src] * cis(path.doppler * src / n);
    if (i < path.delay) {
      long double ph = static_cast<long double>(cfg.c1) *
                       (static_cast<long double>(n) * n + 2.0L * n * (i - path.delay));
      val *= std::conj(cis(static_cast<double>(ph - std::floor(ph))));
    }
    v[i] = val;
  }
  return path.gain * daft(v, cfg);
}

CVec complex_noise(Eigen::Index n, double variance, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(variance / 2.0));
  CVec w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double re = g(rng);
    double im = g(rng);
    w[i] = {re, im};
  }
  return w;
}

CVec apply_channel_time(const CVec& s_cpp, const ChannelRealization& ch, const AfdmConfig& cfg,
                        std::mt19937_64* rng) {
  const int n = cfg.n_sub, ncp = cfg.n_cpp;
  if (s_cpp.size() != n + ncp) throw ConfigError("apply_channel_time: expected prefixed record");
  for (const auto& p : ch.paths)
    if (p.delay < 0 || (p.delay > 0 && p.delay >= ncp))
      throw ConfigError("path delay " + std::to_string(p.delay) + " not covered by prefix of " +
                        std::to_string(ncp));
  CVec y = CVec::Zero(n + ncp);
  for (const auto& p : ch.paths) {
    for (int j = p.delay; j < n + ncp; ++j) {
      const int nn = j - ncp;  // sample index relative to symbol start
      y[j] += p.gain * s_cpp[j - p.delay] * cis(p.doppler * (nn - p.delay) / n);
    }
  }
  if (rng && ch.noise_power_comm > 0) y += complex_noise(n + ncp, ch.noise_power_comm, *rng);
  return y;
}

ChannelRealization sample_channel(int L, int tau_m, int nu_m, double noise_power,
                                  std::mt19937_64& rng) {
  const int lm = (2 * nu_m + 1) * (tau_m + 1);
  if (L < 1) throw ParameterError("L must be at least 1");
  if (L > lm) throw ParameterError("L exceeds the number of grid paths L_m");
  // partial Fisher-Yates over the grid
  std::vector<int> idx(lm);
  for (int i = 0; i < lm; ++i) idx[i] = i;
  for (int i = 0; i < L; ++i) {
    std::uniform_int_distribution<int> pick(i, lm - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  ChannelRealization ch;
  ch.noise_power_comm = noise_power;
  ch.tau_m = tau_m;
  ch.nu_m = nu_m;
  CVec g = complex_noise(L, 1.0 / L, rng);
  for (int i = 0; i < L; ++i) {
    ChannelPath p;
    p.delay = idx[i] / (2 * nu_m + 1);
    p.doppler = idx[i] % (2 * nu_m + 1) - nu_m;
    p.gain = g[i];
    ch.paths.push_back(p);
  }
  return ch;
}

CVec sensing_echo(const CVec& x, const SensingTarget& t, const AfdmConfig& cfg,
                  std::mt19937_64* rng) {
  const int n = cfg.n_sub;
  if (t.delay < 0) throw ConfigError("target delay must be non-negative");
  cfg.check_delay_budget(t.delay);
  CVec v = delayed_waveform(x, cfg, t.delay);
  CVec r(n);
  for (int i = 0; i < n; ++i) r[i] = t.gain * v[i] * cis(t.doppler * i / n);
  if (rng && t.noise_power > 0) r += complex_noise(n, t.noise_power, *rng);
  return r;
}

RangeVelocity delay_doppler_to_range_velocity(double tau_hat, double nu_hat, const AfdmConfig& cfg) {
  return {kSpeedOfLight * tau_hat * cfg.t_s() / 2.0,
          kSpeedOfLight * nu_hat * cfg.delta_f / (2.0 * cfg.f_c)};
}

}  // namespace afdm
