#include <doctest.h>

#include <random>

#include "afdm/daft.hpp"
#include "afdm/estimator.hpp"
#include "afdm/pilots.hpp"

using namespace afdm;

namespace {

AfdmConfig cfg_n(int n) {
  AfdmConfig c;
  c.n_sub = n;
  c.n_cpp = n / 4;
  c.c1 = 8.0 / (2.0 * n);
  return c;
}

CVec random_vec(int n, std::mt19937_64& rng, double var = 1.0) {
  std::normal_distribution<double> g(0, std::sqrt(var / 2));
  CVec v(n);
  for (auto& z : v) z = cd(g(rng), g(rng));
  return v;
}

// Dense single-path matrix built from its definition: column q of
// A Gamma Pi^tau Delta_nu A^H is the DAFT of the delayed, Doppler-shifted
// chirp for subcarrier q, with the prefix supplying negative instants.
CMat dense_path(int tau, int nu, const AfdmConfig& c) {
  const int N = c.n_sub;
  auto chirp = [&](int m, long long n) {
    long double ph = (long double)c.c1 * n * n + (long double)m * n / N + (long double)c.c2 * m * m;
    return std::polar(1.0 / std::sqrt(double(N)), 2 * kPi * double(ph - std::floor(ph)));
  };
  CMat h(N, N);
  for (int q = 0; q < N; ++q)
    for (int p = 0; p < N; ++p) {
      cd acc = 0;
      for (int n = 0; n < N; ++n) acc += std::conj(chirp(p, n)) * chirp(q, n - tau) * std::polar(1.0, 2 * kPi * nu * (n - tau) / double(N));
      h(p, q) = acc;
    }
  return h;
}

}  // namespace

TEST_CASE("MMSE estimate against the covariance-form oracle") {
  AfdmConfig c = cfg_n(16);
  std::mt19937_64 rng(3);
  BasisGrid g = BasisGrid::make(1, 1);
  CVec x = random_vec(16, rng, 4.0);
  CMat psi(16, g.size());
  for (int i = 0; i < g.size(); ++i) psi.col(i) = dense_path(g.taps[i].first, g.taps[i].second, c) * x;
  CHECK((build_psi(x, g, c) - psi).cwiseAbs().maxCoeff() < 1e-10);

  RVec ca(g.size());
  for (int i = 0; i < g.size(); ++i) ca[i] = 0.1 + 0.05 * i;
  const double s2 = 0.3;
  CVec y = random_vec(16, rng);
  CMat C = ca.cast<cd>().asDiagonal();
  CMat S = psi * C * psi.adjoint() + s2 * CMat::Identity(16, 16);
  CMat K = C * psi.adjoint() * S.inverse();
  CVec want = K * y;
  RVec post = (C - K * psi * C).diagonal().real();

  auto sol = mmse_solve(y, psi, {ca, s2});
  CHECK((sol.alpha_hat - want).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((sol.posterior_var - post).cwiseAbs().maxCoeff() < 1e-10);
  MmseEstimator est(psi, ca);
  CHECK((est.solve(y, s2).alpha_hat - want).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("LS limit, zero observation and phase equivariance") {
  AfdmConfig c = cfg_n(16);
  std::mt19937_64 rng(8);
  BasisGrid g = BasisGrid::make(1, 1);
  CVec x = random_vec(16, rng, 4.0);
  CMat psi = build_psi(x, g, c);
  CVec alpha = random_vec(g.size(), rng);
  CVec y = psi * alpha;
  RVec inf = RVec::Constant(g.size(), std::numeric_limits<double>::infinity());
  CHECK((mmse_estimate(y, psi, {inf, 0.1}) - alpha).cwiseAbs().maxCoeff() < 1e-9);
  RVec ca = RVec::Constant(g.size(), 0.2);
  CHECK(mmse_estimate(CVec::Zero(16), psi, {ca, 0.1}).norm() == 0);
  const cd rot = std::polar(1.0, 0.7);
  CVec yn = y + random_vec(16, rng, 0.1);
  CHECK((mmse_estimate(rot * yn, psi, {ca, 0.1}) - rot * mmse_estimate(yn, psi, {ca, 0.1})).norm() < 1e-10);
  // pinned taps stay zero
  ca[2] = 0;
  CHECK(mmse_estimate(yn, psi, {ca, 0.1})[2] == cd(0));
}

TEST_CASE("rank-deficient LS raises a numerical error") {
  CMat psi = CMat::Zero(8, 2);
  psi.col(0).setOnes();
  psi.col(1).setOnes();
  RVec inf = RVec::Constant(2, std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(mmse_solve(CVec::Ones(8), psi, {inf, 0.1}), NumericalError);
}

TEST_CASE("thresholding and reconstruction") {
  CVec a(4);
  a << cd(0.1), cd(0, 0.5), cd(-0.3), cd(0);
  CHECK(threshold_paths(a, 0.2) == std::vector<uint8_t>{0, 1, 1, 0});
  CHECK(threshold_paths(a, 0.0) == std::vector<uint8_t>{1, 1, 1, 0});
  CHECK(threshold_paths(a, 10.0) == std::vector<uint8_t>{0, 0, 0, 0});
  RVec e(4);
  e << 0.05, 0.6, 0.1, 0;
  CHECK(threshold_paths(a, e) == std::vector<uint8_t>{1, 0, 1, 0});
  CHECK_THROWS(threshold_paths(a, -1.0));

  AfdmConfig c = cfg_n(16);
  BasisGrid g = BasisGrid::make(1, 1);
  std::mt19937_64 rng(2);
  CVec alpha = random_vec(g.size(), rng);
  std::vector<uint8_t> b{1, 0, 1, 1, 0, 1};
  CMat want = CMat::Zero(16, 16);
  for (int i = 0; i < g.size(); ++i)
    if (b[i]) want += alpha[i] * dense_path(g.taps[i].first, g.taps[i].second, c);
  CHECK((reconstruct_channel(alpha, b, g, c) - want).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(channel_mse(want, want) == 0);
  CHECK(effective_noise_variance(RVec::Constant(3, 0.5), 2.0, 0.1) == doctest::Approx(3.1));
}

TEST_CASE("basis grid ordering") {
  BasisGrid g = BasisGrid::make(2, 1);
  REQUIRE(g.size() == 9);
  CHECK(g.taps[0] == std::pair<int, int>{0, -1});
  CHECK(g.taps[4] == std::pair<int, int>{1, 0});
  CHECK(g.taps[8] == std::pair<int, int>{2, 1});
  for (int i = 0; i < 9; ++i) CHECK(g.index_of(g.taps[i].first, g.taps[i].second) == i);
  CHECK(g.index_of(3, 0) == -1);
}

TEST_CASE("equalizer recovers data on a known noiseless channel") {
  AfdmConfig c = cfg_n(16);
  std::mt19937_64 rng(6);
  CMat h = 0.8 * dense_path(0, 0, c) + cd(0.3, 0.2) * dense_path(1, 1, c);
  FrameSpec spec;
  spec.data_symbol_power = 1;
  auto bits = random_bits(32, rng);
  CVec xd = map_bits(bits, 16, spec);
  CVec xp = CVec::Zero(16);
  xp[0] = 10;
  auto eq = equalize_demod(h * (xp + xd), h, xp, spec, 1e-9);
  CHECK(eq.bits == bits);
  CHECK((eq.symbols - xd).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("re-estimation does not increase the channel error in most frames") {
  AfdmConfig c = AfdmConfig::table1();
  const int tau_m = 2, nu_m = 2;
  BasisGrid g = BasisGrid::make(tau_m, nu_m);
  auto ops = basis_operators(g, c);
  CVec xp = proposed_pilot(c, nu_m, 1, 100);
  MmseEstimator est(build_psi(xp, ops), RVec::Constant(g.size(), 1.0 / g.size()));
  const double s2 = std::pow(10.0, -0.9) / 128;
  FrameSpec spec;
  spec.pilot_power = 100;
  spec.data_symbol_power = s2 * std::pow(10.0, 1.5);
  std::mt19937_64 rng(12);
  int better = 0, ties = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    auto ch = sample_channel(3, tau_m, nu_m, s2, rng);
    CMat h = effective_channel(ch, c);
    auto bits = random_bits(256, rng);
    CVec y = h * (xp + map_bits(bits, 128, spec)) + complex_noise(128, s2, rng);
    IterativeOptions opt;
    auto res = iterative_estimate(y, xp, est, ops, spec, s2, opt, &h, &bits);
    REQUIRE(res.iterations.size() == 2);
    double m1 = res.iterations[0].mse, m2 = res.iterations[1].mse;
    better += m2 <= m1;
    ties += m2 == m1;
  }
  MESSAGE("iteration 2 no worse in " << better << " of " << trials);
  CHECK(better >= 0.9 * trials);
  CHECK(ties < trials);
}

TEST_CASE("exact data feedback cancels the data term") {
  AfdmConfig c = cfg_n(64);
  BasisGrid g = BasisGrid::make(2, 2);
  auto ops = basis_operators(g, c);
  CVec xp = proposed_pilot(c, 2, 1, 100);
  MmseEstimator est(build_psi(xp, ops), RVec::Constant(g.size(), std::numeric_limits<double>::infinity()));
  std::mt19937_64 rng(30);
  auto ch = sample_channel(3, 2, 2, 0, rng);
  CMat h = effective_channel(ch, c);
  FrameSpec spec;
  CVec xd = random_symbols(64, spec, rng);
  CVec y = h * (xp + xd);
  CVec a = refine_with_known_data(y, xd, h, est, 0.0);
  for (const auto& p : ch.paths) CHECK(std::abs(a[g.index_of(p.delay, int(p.doppler))] - p.gain) < 1e-8);
  CHECK((reconstruct_channel(a, std::vector<uint8_t>(g.size(), 1), ops) - h).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("iteration bookkeeping") {
  AfdmConfig c = cfg_n(16);
  BasisGrid g = BasisGrid::make(1, 1);
  auto ops = basis_operators(g, c);
  CVec xp = CVec::Zero(16);
  xp[0] = 10;
  xp[8] = 10;
  MmseEstimator est(build_psi(xp, ops), RVec::Constant(g.size(), 1.0 / 6));
  FrameSpec spec;
  spec.data_symbol_power = 0;
  IterativeOptions opt;
  opt.n_iter = 3;
  CVec y = 0.9 * ops[1].apply(xp);
  auto res = iterative_estimate(y, xp, est, ops, spec, 1e-3, opt);
  CHECK(res.iterations.size() == 3);
  CHECK(res.indicator[1] == 1);
  CHECK(std::abs(res.alpha_hat[1] - 0.9) < 0.01);
  opt.n_iter = 0;
  CHECK_THROWS_AS(iterative_estimate(y, xp, est, ops, spec, 1e-3, opt), ConfigError);
}
