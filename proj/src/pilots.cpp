#include "afdm/pilots.hpp"

#include <cmath>
#include <numeric>

#include "afdm/daft.hpp"

namespace afdm {

const char* pilot_kind_name(PilotKind k) {
  switch (k) {
    case PilotKind::proposed: return "proposed";
    case PilotKind::traditional_spi: return "spi";
    case PilotKind::single: return "single";
    case PilotKind::raw_zc: return "raw_zc";
  }
  return "?";
}

PilotKind parse_pilot_kind(const std::string& s) {
  if (s == "proposed") return PilotKind::proposed;
  if (s == "spi" || s == "traditional_spi") return PilotKind::traditional_spi;
  if (s == "single") return PilotKind::single;
  if (s == "raw_zc") return PilotKind::raw_zc;
  throw ConfigError("unknown pilot scheme '" + s + "'");
}

CVec zc_sequence(int length, int root) {
  if (length < 1) throw ParameterError("ZC length must be positive");
  if (std::gcd(length, std::abs(root)) != 1)
    throw ParameterError("ZC root " + std::to_string(root) + " not coprime with length " +
                         std::to_string(length));
  CVec z(length);
  const long long n2 = 2LL * length;
  for (long long k = 0; k < length; ++k) {
    long long e = (length % 2 == 0) ? k * k : k * (k + 1);
    // exp(-j pi u e / Np) = exp(-j2pi (u e mod 2Np) / (2Np))
    long long num = pos_mod((static_cast<long long>(root) * (e % n2)) % n2, n2);
    z[k] = std::conj(cis(static_cast<double>(num) / n2));
  }
  return z;
}

namespace {

int log2_exact(int n) {
  if (n < 1 || (n & (n - 1)) != 0) return -1;
  int p = 0;
  while ((1 << p) < n) ++p;
  return p;
}

}  // namespace

C1Choice select_c1_q(int nu_m, const AfdmConfig& cfg) {
  if (nu_m < 0) throw ParameterError("nu_m must be non-negative");
  int q = 0;
  while ((1 << q) < 2 * nu_m + 1) ++q;
  return {static_cast<double>(1 << q) / (2.0 * cfg.n_sub), q};
}

ProposedLayout proposed_layout(const AfdmConfig& cfg, int nu_m, int r) {
  const int p = log2_exact(cfg.n_sub);
  if (p < 1) throw ParameterError("proposed pilot needs n_sub = 2^p");
  auto ch = select_c1_q(nu_m, cfg);
  if (std::abs(cfg.c1 - ch.c1) > 1e-12)
    throw ParameterError("proposed pilot needs c1 = " + std::to_string(ch.c1) + " for nu_m = " +
                         std::to_string(nu_m));
  if (r < 0 || r > p - ch.q)
    throw ParameterError("r must lie in [0, " + std::to_string(p - ch.q) + "]");
  ProposedLayout l{p, ch.q, r, 1 << (ch.q + r), 0};
  l.count = cfg.n_sub / l.spacing;
  return l;
}

CVec proposed_pilot(const AfdmConfig& cfg, int nu_m, int r, double pilot_power, int root) {
  auto l = proposed_layout(cfg, nu_m, r);
  CVec z = zc_sequence(l.count, root);
  CVec x = CVec::Zero(cfg.n_sub);
  const double amp = std::sqrt(pilot_power / l.count);
  const long long den = 2LL * cfg.n_sub;
  for (long long k = 0; k < l.count; ++k) {
    const long long m = k * l.spacing;
    // m^2 2^r / (2 Q Nc) = k^2 Q 2^r / (2 Nc)
    long long num = pos_mod((k * k % den) * ((1LL * l.spacing << r) % den), den);
    double psi = static_cast<double>(num) / den - c2_phase(cfg, m);
    x[m] = amp * z[k] * cis(psi);
  }
  return x;
}

SpiLayout spi_layout(const AfdmConfig& cfg, int tau_m, int nu_m, int spacing, int count) {
  SpiLayout l{spacing, count};
  if (l.spacing <= 0) {
    if (l.count > 0)
      l.spacing = cfg.n_sub / l.count;
    else
      l.spacing = cfg.k1() * tau_m + 2 * nu_m + 1;
  }
  if (l.spacing < 1) throw ParameterError("pilot spacing must be positive");
  if (l.count <= 0) l.count = cfg.n_sub / l.spacing;
  if (l.count < 1) throw ParameterError("pilot spacing leaves no pilot (Np = 0)");
  if (static_cast<long long>(l.count - 1) * l.spacing >= cfg.n_sub)
    throw ParameterError("Np pilots at spacing Q do not fit in n_sub");
  return l;
}

CVec traditional_spi_pilot(const AfdmConfig& cfg, int tau_m, int nu_m, double pilot_power,
                           int root, int spacing, int count) {
  auto l = spi_layout(cfg, tau_m, nu_m, spacing, count);
  CVec z = zc_sequence(l.count, root);
  CVec x = CVec::Zero(cfg.n_sub);
  const double amp = std::sqrt(pilot_power / l.count);
  for (int k = 0; k < l.count; ++k) x[k * l.spacing] = amp * z[k];
  return x;
}

CVec single_pilot(const AfdmConfig& cfg, double pilot_power) {
  CVec x = CVec::Zero(cfg.n_sub);
  x[0] = std::sqrt(pilot_power);
  return x;
}

CVec raw_zc_pilot(const AfdmConfig& cfg, int spacing, double pilot_power, int root) {
  if (spacing < 1) throw ParameterError("pilot spacing must be positive");
  return traditional_spi_pilot(cfg, 0, 0, pilot_power, root, spacing, cfg.n_sub / spacing);
}

int max_unambiguous_delay(int spacing, int nu_m, double c1, int n_sub) {
  double k = 2.0 * c1 * n_sub;
  if (k <= 0) throw ParameterError("c1 must be positive");
  double b = std::floor((spacing - 2.0 * nu_m - 1.0) / k + 1e-12);
  return b < 0 ? 0 : static_cast<int>(b);
}

CVec make_pilot(const PilotScheme& s, const AfdmConfig& cfg) {
  switch (s.kind) {
    case PilotKind::proposed: return proposed_pilot(cfg, s.nu_m, s.r, s.pilot_power, s.root);
    case PilotKind::traditional_spi:
      return traditional_spi_pilot(cfg, s.tau_m, s.nu_m, s.pilot_power, s.root, s.spacing, s.count);
    case PilotKind::single: return single_pilot(cfg, s.pilot_power);
    case PilotKind::raw_zc:
      return traditional_spi_pilot(cfg, 0, 0, s.pilot_power, s.root, s.spacing > 0 ? s.spacing : 1,
                                   s.count);
  }
  throw ConfigError("bad pilot kind");
}

}  // namespace afdm
