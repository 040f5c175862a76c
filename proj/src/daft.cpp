#include "afdm/daft.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "fft.hpp"

namespace afdm {

int AfdmConfig::k1() const {
  double k = 2.0 * c1 * n_sub;
  double r = std::round(k);
  if (std::abs(k - r) > 1e-9)
    throw ConfigError("2*c1*n_sub must be an integer, got " + std::to_string(k));
  return static_cast<int>(r);
}

void AfdmConfig::validate() const {
  if (n_sub < 1) throw ConfigError("n_sub must be positive");
  if (n_cpp < 0) throw ConfigError("n_cpp must be non-negative");
  if (n_cpp >= n_sub) throw ConfigError("n_cpp must be smaller than n_sub");
  if (!(delta_f > 0)) throw ConfigError("delta_f must be positive");
  if (!(f_c > 0)) throw ConfigError("f_c must be positive");
  if (!std::isfinite(c2)) throw ConfigError("c2 must be finite");
  if (c1 < 0) throw ConfigError("c1 must be non-negative");
  k1();
}

bool AfdmConfig::c1_within_bounds(int tau_m, int nu_m) const {
  const double lo = (2.0 * nu_m + 1.0) / (2.0 * n_sub);
  const double hi = 1.0 / (2.0 * (tau_m + 1.0));
  const double tol = 1e-12;
  return c1 >= lo - tol && c1 <= hi + tol;
}

void AfdmConfig::check_delay_budget(double max_delay) const {
  if (std::floor(max_delay) >= n_cpp)
    throw ConfigError("delay " + std::to_string(max_delay) + " exceeds prefix length " +
                      std::to_string(n_cpp));
}

AfdmConfig AfdmConfig::table1() { return AfdmConfig{}; }

namespace {

bool on_lattice(const AfdmConfig& cfg) {
  double k = 2.0 * cfg.c1 * cfg.n_sub;
  return std::abs(k - std::round(k)) <= 1e-9;
}

double frac_ld(long double v) {
  long double f = v - std::floor(v);
  return static_cast<double>(f);
}

void check_len(const CVec& v, Eigen::Index n, const char* what) {
  if (v.size() != n)
    throw ConfigError(std::string(what) + ": expected length " + std::to_string(n) + ", got " +
                      std::to_string(v.size()));
}

// phase of exp(-j2pi c1 (N^2 + 2 N idx)) used by the prefix relation
double prefix_phase(const AfdmConfig& cfg, long long idx) {
  const long long n = cfg.n_sub;
  if (on_lattice(cfg)) {
    long long k = std::llround(2.0 * cfg.c1 * n);
    // c1 (N^2 + 2N idx) = k (N + 2 idx) / 2
    return pos_mod(k * (n + 2 * idx), 2) * 0.5;
  }
  return frac_ld(static_cast<long double>(cfg.c1) * (n * n + 2 * n * idx));
}

}  // namespace

double c1_phase(const AfdmConfig& cfg, long long n) {
  const long long two_n = 2LL * cfg.n_sub;
  if (on_lattice(cfg)) {
    long long k = std::llround(2.0 * cfg.c1 * cfg.n_sub);
    long long nn = pos_mod(n, two_n);
    return static_cast<double>(pos_mod(k * ((nn * nn) % two_n), two_n)) / two_n;
  }
  return frac_ld(static_cast<long double>(cfg.c1) * n * n);
}

double c2_phase(const AfdmConfig& cfg, long long m) {
  return frac_ld(static_cast<long double>(cfg.c2) * static_cast<long double>(m * m));
}

CVec idaft(const CVec& x, const AfdmConfig& cfg) {
  const int n = cfg.n_sub;
  check_len(x, n, "idaft");
  CVec tmp(n), s(n);
  for (int m = 0; m < n; ++m) tmp[m] = x[m] * cis(c2_phase(cfg, m));
  fft::backward(tmp.data(), s.data(), n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) s[k] *= cis(c1_phase(cfg, k)) * scale;
  return s;
}

CVec daft(const CVec& s, const AfdmConfig& cfg) {
  const int n = cfg.n_sub;
  check_len(s, n, "daft");
  CVec tmp(n), x(n);
  for (int k = 0; k < n; ++k) tmp[k] = s[k] * std::conj(cis(c1_phase(cfg, k)));
  fft::forward(tmp.data(), x.data(), n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int m = 0; m < n; ++m) x[m] *= std::conj(cis(c2_phase(cfg, m))) * scale;
  return x;
}

CMat build_daft_matrix(const AfdmConfig& cfg) {
  const int n = cfg.n_sub;
  if (n > 4096) throw ConfigError("dense DAFT matrix limited to n_sub <= 4096");
  if (n < 1) throw ConfigError("n_sub must be positive");
  CMat a(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k) {
      double ph = c1_phase(cfg, k) + static_cast<double>((1LL * m * k) % n) / n + c2_phase(cfg, m);
      a(m, k) = std::conj(cis(ph)) * scale;
    }
  return a;
}

CVec add_cpp(const CVec& s, const AfdmConfig& cfg) {
  const int n = cfg.n_sub, ncp = cfg.n_cpp;
  check_len(s, n, "add_cpp");
  if (ncp >= n) throw ConfigError("n_cpp must be smaller than n_sub");
  CVec out(n + ncp);
  for (int i = -ncp; i < 0; ++i) out[i + ncp] = s[n + i] * std::conj(cis(prefix_phase(cfg, i)));
  out.tail(n) = s;
  return out;
}

CVec remove_cpp(const CVec& r, const AfdmConfig& cfg) {
  check_len(r, cfg.n_sub + cfg.n_cpp, "remove_cpp");
  return r.tail(cfg.n_sub);
}

cd synth_direct(const CVec& x, const AfdmConfig& cfg, long long n) {
  const long long nn = cfg.n_sub;
  check_len(x, nn, "synth_direct");
  cd acc = 0;
  for (long long m = 0; m < nn; ++m) {
    double ph = c1_phase(cfg, n) + static_cast<double>(pos_mod(m * n, nn)) / nn + c2_phase(cfg, m);
    acc += x[m] * cis(ph);
  }
  return acc / std::sqrt(static_cast<double>(nn));
}

cd synth_wrapped(const CVec& x, const AfdmConfig& cfg, double t) {
  const int n = cfg.n_sub;
  check_len(x, n, "synth_wrapped");
  const long double tl = t;
  const long double c1 = cfg.c1;
  const long double u = 2 * c1 * tl;
  const long double q0 = std::floor(u);
  const long double f = u - q0;
  // m >= mstar wraps one band further (q_m = q0 + 1)
  long double mst = std::ceil(static_cast<long double>(n) * (1 - f));
  int mstar = mst > n ? n : static_cast<int>(mst);
  if (mstar < 0) mstar = 0;
  cd lo = 0, hi = 0;
  const cd step = cis(static_cast<double>(tl / n - std::floor(tl / n)));
  cd w = 1;
  for (int m = 0; m < n; ++m) {
    if ((m & 31) == 0) w = cis(frac_ld(tl * m / n));
    cd term = x[m] * cis(c2_phase(cfg, m)) * w;
    if (m < mstar) lo += term; else hi += term;
    w *= step;
  }
  const double base = frac_ld(c1 * tl * tl - q0 * tl);
  cd wrap = cis(frac_ld(-tl));
  return cis(base) * (lo + wrap * hi) / std::sqrt(static_cast<double>(n));
}

CVec delayed_waveform(const CVec& x, const AfdmConfig& cfg, double shift) {
  const int n = cfg.n_sub;
  check_len(x, n, "delayed_waveform");
  CVec v(n);
  if (shift == std::round(shift)) {
    const long long k = std::llround(shift);
    CVec s = idaft(x, cfg);
    for (int i = 0; i < n; ++i) {
      long long idx = i - k;
      cd factor = 1;
      while (idx < 0) {
        factor *= std::conj(cis(prefix_phase(cfg, idx)));
        idx += n;
      }
      while (idx >= n) {
        idx -= n;
        factor *= cis(prefix_phase(cfg, idx));
      }
      v[i] = s[idx] * factor;
    }
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = synth_wrapped(x, cfg, i - shift);
  return v;
}

}  // namespace afdm
