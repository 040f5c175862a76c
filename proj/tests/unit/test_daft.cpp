#include <doctest.h>

#include <random>

#include "afdm/daft.hpp"

using namespace afdm;

namespace {

CVec random_vec(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVec v(n);
  for (auto& z : v) z = cd(g(rng), g(rng));
  return v;
}

// A[m,n] = exp(-j2pi(c1 n^2 + mn/N + c2 m^2)) / sqrt(N), written out directly
CMat oracle_matrix(const AfdmConfig& c) {
  const int n = c.n_sub;
  CMat a(n, n);
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k) {
      double ph = c.c1 * k * k + static_cast<double>(m) * k / n + c.c2 * m * m;
      a(m, k) = std::polar(1.0 / std::sqrt(n), -2 * kPi * ph);
    }
  return a;
}

// s[n] = sum_m x[m] exp(j2pi(c1 n^2 + mn/N + c2 m^2)) / sqrt(N), any integer n
cd oracle_sample(const CVec& x, const AfdmConfig& c, long long n) {
  const int N = c.n_sub;
  cd acc = 0;
  for (int m = 0; m < N; ++m) {
    long double ph = static_cast<long double>(c.c1) * n * n + static_cast<long double>(m) * n / N +
                     static_cast<long double>(c.c2) * m * m;
    ph -= std::floor(ph);
    acc += x[m] * std::polar(1.0, 2 * kPi * static_cast<double>(ph));
  }
  return acc / std::sqrt(static_cast<double>(N));
}

AfdmConfig cfg_for(int n) {
  AfdmConfig c;
  c.n_sub = n;
  c.n_cpp = n / 4;
  c.c1 = 8.0 / (2.0 * n) < 0.5 ? 8.0 / (2.0 * n) : 1.0 / (2.0 * n);
  return c;
}

}  // namespace

TEST_CASE("idaft and daft match the dense matrix") {
  std::mt19937_64 rng(11);
  for (int n : {8, 16, 64, 128}) {
    AfdmConfig c = cfg_for(n);
    CMat a = oracle_matrix(c);
    CVec x = random_vec(n, rng);
    CHECK((idaft(x, c) - a.adjoint() * x).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((daft(x, c) - a * x).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((daft(idaft(x, c), c) - x).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((build_daft_matrix(c) - a).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("DAFT matrix is unitary") {
  AfdmConfig c = cfg_for(64);
  CMat a = build_daft_matrix(c);
  CHECK((a * a.adjoint() - CMat::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("c1 = c2 = 0 reduces to the unitary DFT") {
  AfdmConfig c;
  c.n_sub = 16;
  c.n_cpp = 4;
  c.c1 = 0;
  c.c2 = 0;
  std::mt19937_64 rng(3);
  CVec s = random_vec(16, rng);
  CVec x = daft(s, c);
  for (int m = 0; m < 16; ++m) {
    cd acc = 0;
    for (int k = 0; k < 16; ++k) acc += s[k] * std::polar(1.0, -2 * kPi * m * k / 16.0);
    CHECK(std::abs(x[m] - acc / 4.0) < 1e-12);
  }
}

TEST_CASE("Parseval and linearity") {
  std::mt19937_64 rng(5);
  AfdmConfig c = cfg_for(128);
  CVec x = random_vec(128, rng), y = random_vec(128, rng);
  CHECK(std::abs(idaft(x, c).squaredNorm() - x.squaredNorm()) < 1e-9 * x.squaredNorm());
  cd a(0.3, -1.2);
  CHECK((idaft(a * x + y, c) - (a * idaft(x, c) + idaft(y, c))).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("prefix equals the synthesis sum at negative indices") {
  std::mt19937_64 rng(7);
  AfdmConfig c = cfg_for(64);
  CVec x = random_vec(64, rng);
  CVec s = idaft(x, c);
  CVec ext = add_cpp(s, c);
  REQUIRE(ext.size() == 64 + c.n_cpp);
  for (int n = -c.n_cpp; n < 64; ++n) CHECK(std::abs(ext[n + c.n_cpp] - oracle_sample(x, c, n)) < 1e-10);
  CHECK((remove_cpp(ext, c) - s).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("direct and wrapped synthesis agree with the oracle at integer instants") {
  std::mt19937_64 rng(9);
  AfdmConfig c = cfg_for(32);
  CVec x = random_vec(32, rng);
  for (int n = -8; n < 32; ++n) {
    cd o = oracle_sample(x, c, n);
    CHECK(std::abs(synth_direct(x, c, n) - o) < 1e-10);
    CHECK(std::abs(synth_wrapped(x, c, n) - o) < 1e-10);
  }
}

TEST_CASE("delayed waveform") {
  std::mt19937_64 rng(13);
  AfdmConfig c = cfg_for(64);
  CVec x = random_vec(64, rng);
  SUBCASE("integer shift reads the prefixed record") {
    for (int shift : {0, 1, 5, 15}) {
      CVec v = delayed_waveform(x, c, shift);
      for (int n = 0; n < 64; ++n) CHECK(std::abs(v[n] - oracle_sample(x, c, n - shift)) < 1e-10);
    }
  }
  SUBCASE("fractional shift is continuous away from integer 2c1N*shift") {
    CVec a = delayed_waveform(x, c, 2.3), b = delayed_waveform(x, c, 2.3 + 1e-7);
    CHECK((a - b).norm() / a.norm() < 1e-4);
    // 2c1N * 2.5 = 20: the wrapped chirp jumps here
    CVec d = delayed_waveform(x, c, 2.5 - 1e-9), e = delayed_waveform(x, c, 2.5 + 1e-9);
    CHECK((d - e).norm() / d.norm() > 1e-3);
  }
  SUBCASE("fractional shift keeps the energy of a chirp frame") {
    CVec v = delayed_waveform(x, c, 3.3);
    CHECK(v.norm() == doctest::Approx(x.norm()).epsilon(0.2));
  }
}

TEST_CASE("c1 phase is exact on the lattice") {
  AfdmConfig c = cfg_for(128);
  for (long long n : {0LL, 1LL, 7LL, 127LL, 100000LL}) {
    long double ref = static_cast<long double>(n) * n * c.k1() / (2.0L * c.n_sub);
    ref -= std::floor(ref);
    CHECK(std::abs(c1_phase(c, n) - static_cast<double>(ref)) < 1e-12);
  }
}

TEST_CASE("config validation") {
  AfdmConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.k1() == 8);
  c.c1 = 0.01;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = AfdmConfig{};
  c.n_cpp = 128;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = AfdmConfig{};
  CHECK(c.c1_within_bounds(2, 2));
  CHECK_THROWS_AS(c.check_delay_budget(32), ConfigError);
  CHECK_NOTHROW(c.check_delay_budget(31));
}
