#include <doctest.h>

#include "afdm/daft.hpp"
#include "afdm/pilots.hpp"

using namespace afdm;

namespace {

AfdmConfig cfg_n(int n, int q = 3) {
  AfdmConfig c;
  c.n_sub = n;
  c.n_cpp = n / 4;
  c.c1 = std::ldexp(1.0, q) / (2.0 * n);
  return c;
}

// chi(tau, nu) = sum_n s*[n] s[<n - tau>] exp(j2pi nu n / N)
cd af_oracle(const CVec& s, int tau, int nu) {
  const int n = static_cast<int>(s.size());
  cd acc = 0;
  for (int k = 0; k < n; ++k)
    acc += std::conj(s[k]) * s[((k - tau) % n + n) % n] * std::polar(1.0, 2 * kPi * nu * k / n);
  return acc;
}

double max_side(const CVec& s, int tau_m, int nu_span, bool nonzero_nu) {
  double m = 0;
  for (int t = -tau_m; t <= tau_m; ++t)
    for (int v = -nu_span; v <= nu_span; ++v) {
      if (t == 0 && v == 0) continue;
      if (nonzero_nu && v == 0) continue;
      m = std::max(m, std::abs(af_oracle(s, t, v)));
    }
  return m;
}

}  // namespace

TEST_CASE("ZC sequences are constant amplitude with ideal cyclic autocorrelation") {
  for (int len : {7, 8, 16, 31}) {
    for (int root : {1, 3}) {
      CVec z = zc_sequence(len, root);
      for (int k = 0; k < len; ++k) {
        double e = (len % 2 == 0) ? double(k) * k : double(k) * (k + 1);
        CHECK(std::abs(z[k] - std::polar(1.0, -kPi * root * e / len)) < 1e-12);
      }
      for (int s = 1; s < len; ++s) {
        cd acc = 0;
        for (int k = 0; k < len; ++k) acc += z[k] * std::conj(z[(k + s) % len]);
        CHECK(std::abs(acc) < 1e-10);
      }
    }
  }
  CHECK_THROWS(zc_sequence(8, 2));
}

TEST_CASE("c1 and q selection") {
  AfdmConfig c = cfg_n(128);
  struct Row {
    int nu_m, q;
  } rows[] = {{0, 0}, {1, 2}, {2, 3}, {3, 3}, {4, 4}, {7, 4}, {8, 5}};
  for (auto r : rows) {
    auto ch = select_c1_q(r.nu_m, c);
    CHECK(ch.q == r.q);
    CHECK(ch.c1 == doctest::Approx(std::ldexp(1.0, r.q) / 256));
    // 2^(q-1) < 2 nu_m + 1 <= 2^q
    CHECK((1 << ch.q) >= 2 * r.nu_m + 1);
    if (ch.q > 0) CHECK((1 << (ch.q - 1)) < 2 * r.nu_m + 1);
  }
}

TEST_CASE("proposed pilot matches the closed form") {
  AfdmConfig c = cfg_n(128);
  const double sp2 = 100;
  for (int r : {0, 1, 2}) {
    CVec x = proposed_pilot(c, 2, r, sp2);
    const int Q = 1 << (3 + r), np = 128 / Q;
    CVec z = zc_sequence(np, 1);
    CHECK(x.squaredNorm() == doctest::Approx(sp2));
    for (int m = 0; m < 128; ++m) {
      if (m % Q) {
        CHECK(x[m] == cd(0));
        continue;
      }
      long double psi = (long double)m * m * std::ldexp(1.0, r) / (2.0L * Q * 128) - (long double)c.c2 * m * m;
      cd want = std::sqrt(sp2 / np) * z[m / Q] * std::polar(1.0, 2 * kPi * double(psi - std::floor(psi)));
      CHECK(std::abs(x[m] - want) < 1e-9);
    }
  }
  CHECK_THROWS(proposed_pilot(c, 2, 5, sp2));
  CHECK_THROWS(proposed_pilot(cfg_n(128, 2), 2, 1, sp2));
}

TEST_CASE("proposed pilot has no sidelobes inside the delay-Doppler region") {
  for (int n : {64, 128}) {
    AfdmConfig c = cfg_n(n);
    for (int r = 0; r <= 2; ++r) {
      CVec s = idaft(proposed_pilot(c, 2, r, 100), c);
      const int tau_m = n / 8 - 1;
      CHECK(max_side(s, tau_m, 4, false) <= 1e-10 * 100);
      CHECK(std::abs(af_oracle(s, 0, 0) - 100.0) < 1e-9);
    }
  }
}

TEST_CASE("dropping psi brings sidelobes back at nonzero Doppler") {
  AfdmConfig c = cfg_n(128);
  CVec s = idaft(raw_zc_pilot(c, 1, 100), c);
  CHECK(max_side(s, 1, 2, true) > 1e-3 * 100);
}

TEST_CASE("SPI layout and delay reach") {
  AfdmConfig c = cfg_n(128);
  auto l = spi_layout(c, 2, 2);
  CHECK(l.spacing == 8 * 2 + 5);
  CHECK(l.count == 128 / 21);
  auto f = spi_layout(c, 15, 2, 0, 8);
  CHECK(f.spacing == 16);
  CHECK(f.count == 8);
  CHECK(max_unambiguous_delay(16, 2, c.c1, 128) == 1);
  CHECK(max_unambiguous_delay(21, 2, c.c1, 128) == 2);
  CHECK(max_unambiguous_delay(4, 2, c.c1, 128) == 0);
  CVec x = traditional_spi_pilot(c, 15, 2, 100, 1, 16, 8);
  CHECK(x.squaredNorm() == doctest::Approx(100));
  for (int m = 0; m < 128; ++m) CHECK((m % 16 == 0) == (std::abs(x[m]) > 0));
  CHECK_THROWS(spi_layout(c, 40, 2));
}

TEST_CASE("single pilot and dispatch") {
  AfdmConfig c = cfg_n(64);
  CVec x = single_pilot(c, 100);
  CHECK(x[0] == cd(10));
  CHECK(x.tail(63).norm() == 0);
  PilotScheme s;
  s.kind = PilotKind::proposed;
  s.r = 1;
  CHECK((make_pilot(s, c) - proposed_pilot(c, 2, 1, 100)).norm() == 0);
  CHECK(parse_pilot_kind("spi") == PilotKind::traditional_spi);
  CHECK_THROWS(parse_pilot_kind("bogus"));
}
