#include <doctest.h>

#include <random>

#include "afdm/channel.hpp"
#include "afdm/daft.hpp"
#include "afdm/modem.hpp"
#include "afdm/pilots.hpp"
#include "afdm/sensing.hpp"

using namespace afdm;

namespace {

AfdmConfig cfg_n(int n) {
  AfdmConfig c;
  c.n_sub = n;
  c.n_cpp = n / 4;
  c.c1 = 8.0 / (2.0 * n);
  return c;
}

CVec random_vec(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVec v(n);
  for (auto& z : v) z = cd(g(rng), g(rng));
  return v;
}

// s[n] at any integer n from the chirp synthesis sum
cd synth(const CVec& x, const AfdmConfig& c, long long n) {
  const int N = c.n_sub;
  cd acc = 0;
  for (int m = 0; m < N; ++m) {
    long double ph = (long double)c.c1 * n * n + (long double)m * n / N + (long double)c.c2 * m * m;
    acc += x[m] * std::polar(1.0, 2 * kPi * double(ph - std::floor(ph)));
  }
  return acc / std::sqrt(double(N));
}

cd rdf_oracle(const CVec& r, const CVec& x, const AfdmConfig& c, int tau, double nu) {
  cd acc = 0;
  for (int n = 0; n < c.n_sub; ++n)
    acc += std::conj(r[n]) * synth(x, c, n - tau) * std::polar(1.0, 2 * kPi * nu * n / c.n_sub);
  return acc;
}

}  // namespace

TEST_CASE("range-Doppler map against the direct sum") {
  AfdmConfig c = cfg_n(32);
  std::mt19937_64 rng(1);
  CVec x = random_vec(32, rng), r = random_vec(32, rng);
  GridSpec g = GridSpec::region(3, 2, 1, 2);
  auto map = rdf(r, x, g, c);
  REQUIRE(map.tau_axis.size() == 4);
  REQUIRE(map.nu_axis.size() == 9);
  for (std::size_t i = 0; i < map.tau_axis.size(); ++i)
    for (std::size_t j = 0; j < map.nu_axis.size(); ++j)
      CHECK(std::abs(map.values(i, j) - rdf_oracle(r, x, c, int(map.tau_axis[i]), map.nu_axis[j])) < 1e-9);
}

TEST_CASE("matched origin equals the frame energy") {
  AfdmConfig c = cfg_n(64);
  std::mt19937_64 rng(2);
  CVec x = random_vec(64, rng);
  auto map = rdf(idaft(x, c), x, GridSpec::region(0, 0), c);
  CHECK(std::abs(map.values(0, 0)) == doctest::Approx(x.squaredNorm()));
}

TEST_CASE("pilot echo lights exactly one cell") {
  AfdmConfig c = AfdmConfig::table1();
  CVec xp = proposed_pilot(c, 2, 1, 100);
  for (auto [tau, nu] : {std::pair<int, int>{0, 0}, {3, -2}, {7, 1}}) {
    SensingTarget t{std::polar(1.0, 0.4), double(tau), double(nu), 0};
    auto map = rdf(sensing_echo(xp, t, c, nullptr), xp, GridSpec::region(15, 2), c);
    for (int i = 0; i < map.values.rows(); ++i)
      for (int j = 0; j < map.values.cols(); ++j) {
        double v = std::abs(map.values(i, j));
        if (map.tau_axis[i] == tau && map.nu_axis[j] == nu)
          CHECK(v == doctest::Approx(100.0));
        else
          CHECK(v < 1e-8);
      }
  }
}

TEST_CASE("noise floor") {
  std::mt19937_64 rng(3);
  RangeDopplerMap m;
  m.values = CMat::Constant(16, 5, cd(2, 0));
  m.tau_axis.resize(16);
  m.nu_axis.resize(5);
  NoiseWindow w;
  CHECK((noise_floor(m, w).array() - 4.0).abs().maxCoeff() < 1e-12);

  // spike: the guard keeps it out of its own floor
  m.values(5, 2) = 100;
  CHECK(noise_floor(m, w)(5, 2) == doctest::Approx(4.0));

  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 5; ++j) m.values(i, j) = cd(std::normal_distribution<double>()(rng), 0.3 * j);
  RMat p = m.values.cwiseAbs2();
  RMat got = noise_floor(m, w);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 5; ++j) {
      // full 5x5 window minus the 3x3 guard block, cyclic indices
      double full = 0, inner = 0;
      for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) {
          double v = p((i + a + 16) % 16, (j + b + 5) % 5);
          full += v;
          if (std::abs(a) <= 1 && std::abs(b) <= 1) inner += v;
        }
      CHECK(got(i, j) == doctest::Approx((full - inner) / 16));
    }
  NoiseWindow bad{2, 2, 2};
  CHECK_THROWS_AS(noise_floor(m, bad), ConfigError);
}

TEST_CASE("detection thresholds") {
  std::mt19937_64 rng(4);
  RangeDopplerMap m;
  m.values = CMat::Zero(8, 5);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 5; ++j) m.values(i, j) = cd(1 + 0.1 * i, 0.2 * j);
  m.tau_axis = {0, 1, 2, 3, 4, 5, 6, 7};
  m.nu_axis = {-2, -1, 0, 1, 2};
  RMat noise = RMat::Ones(8, 5);
  CHECK(detect(m, noise, 0).size() == 40);
  CHECK(detect(m, noise, std::numeric_limits<double>::infinity()).empty());
  auto d = detect(m, noise, 2.0);
  for (std::size_t k = 0; k + 1 < d.size(); ++k) CHECK(d[k].statistic >= d[k + 1].statistic);
  CHECK(d.front().row == 7);
  CHECK(d.front().col == 4);
}

TEST_CASE("fractional delay is resolved on the oversampled grid") {
  AfdmConfig c = AfdmConfig::table1();
  std::mt19937_64 rng(5);
  FrameSpec spec;
  CVec x = proposed_pilot(c, 2, 1, 100) + random_symbols(128, spec, rng);
  SensingTarget t{cd(1, 0), 2.5, 0.5, 0};
  CVec r = sensing_echo(x, t, c, nullptr);
  auto est = estimate_target_oversampled(r, x, 15, 2, 8, 8, c);
  CHECK(std::abs(est.tau - 2.5) <= 1.0 / 16);
  CHECK(std::abs(est.nu - 0.5) <= 1.0 / 16);
}

TEST_CASE("continuous peak search recovers off-grid parameters") {
  AfdmConfig c = AfdmConfig::table1();
  std::mt19937_64 rng(6);
  FrameSpec spec;
  CVec x = proposed_pilot(c, 2, 1, 100) + random_symbols(128, spec, rng);
  for (auto [tau, nu] : {std::pair<double, double>{3.3, -0.71}, {11.04, 1.37}}) {
    SensingTarget t{std::polar(0.8, 1.1), tau, nu, 0};
    CVec r = sensing_echo(x, t, c, nullptr);
    auto map = fine_map(r, x, 15, 2, 8, 8, c);
    auto peak = estimate_target(map);
    auto fine = local_peak_search(r, x, peak, 1.0 / 8, 1.0 / 8, 15, c);
    CHECK(std::abs(fine.tau - tau) < 1e-3);
    CHECK(std::abs(fine.nu - nu) < 1e-3);
    auto par = refine_peak(map, peak);
    CHECK(std::abs(par.tau - tau) <= 1.0 / 16);
  }
}

TEST_CASE("parabolic refinement of a sampled quadratic") {
  RangeDopplerMap m;
  m.tau_axis = {0, 0.5, 1, 1.5, 2};
  m.nu_axis = {-1, 0, 1};
  m.values = CMat::Zero(5, 3);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) {
      double a = m.tau_axis[i] - 1.1, b = m.nu_axis[j] + 0.2;
      m.values(i, j) = 10 - a * a - b * b;
    }
  auto p = refine_peak(m, estimate_target(m));
  CHECK(p.tau == doctest::Approx(1.1));
  CHECK(p.nu == doctest::Approx(-0.2));
}

TEST_CASE("ROC curves are monotone in the threshold") {
  std::mt19937_64 rng(7);
  std::vector<RocTrial> trials(200);
  std::exponential_distribution<double> e;
  for (auto& t : trials) {
    t.peak_statistic = 5 + 10 * e(rng);
    t.peak_on_target = e(rng) < 2.0;
    for (int k = 0; k < 50; ++k) t.clutter.push_back(e(rng));
  }
  std::vector<double> grid;
  for (int k = 0; k <= 60; ++k) grid.push_back(std::pow(10.0, -3 + 0.1 * k));
  auto curve = roc_curve(trials, grid);
  for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
    CHECK(curve[k].pfa >= curve[k + 1].pfa);
    CHECK(curve[k].pd >= curve[k + 1].pd);
  }
  CHECK(curve.front().pfa > 0.99);
  CHECK(curve.back().pfa == 0);
  CHECK(curve.back().pd == 0);
  auto pd = pd_at_pfa(curve, {1e-2, 1e-1, 1});
  CHECK(pd[0] <= pd[1]);
  CHECK(pd[1] <= pd[2]);
}

TEST_CASE("ROC trial bookkeeping") {
  RangeDopplerMap m;
  m.tau_axis = {0, 1, 2, 3, 4, 5};
  m.nu_axis = {-2, -1, 0, 1, 2};
  m.values = CMat::Constant(6, 5, cd(1, 0));
  m.values(3, 1) = 20;
  auto t = roc_trial_stats(m, NoiseWindow{}, 3, -1);
  CHECK(t.peak_on_target);
  CHECK(t.clutter.size() == 30 - 9);
  auto u = roc_trial_stats(m, NoiseWindow{}, 0, 2);
  CHECK_FALSE(u.peak_on_target);
}
