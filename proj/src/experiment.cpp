#include "afdm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "afdm/analysis.hpp"
#include "afdm/channel.hpp"
#include "afdm/daft.hpp"
#include "afdm/parallel.hpp"
#include "afdm/rng.hpp"

namespace afdm {

namespace {

int log2_of(int v) {
  int p = 0;
  while ((1 << p) < v) ++p;
  return (1 << p) == v ? p : -1;
}

CMat dense_channel(const ChannelRealization& ch, const AfdmConfig& cfg) {
  const int n = cfg.n_sub;
  CMat h = CMat::Zero(n, n);
  for (const auto& p : ch.paths) {
    PathOperator op(p.delay, static_cast<int>(p.doppler), cfg);
    for (int q = 0; q < n; ++q) h(op.row_of(q), q) += p.gain * op.coef(q);
  }
  return h;
}

CVec apply_channel(const ChannelRealization& ch, const CVec& x, const AfdmConfig& cfg) {
  CVec y = CVec::Zero(x.size());
  for (const auto& p : ch.paths) PathOperator(p.delay, static_cast<int>(p.doppler), cfg).accumulate(x, p.gain, y);
  return y;
}

double undb(double v) { return std::pow(10.0, v / 10.0); }

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) g[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
  return g;
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericalError(std::string("non-finite ") + what);
}

cd unit_phase(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return cis(u(rng));
}

}  // namespace

CVec scheme_pilot(const SchemeSpec& s, const ExperimentConfig& c) {
  PilotScheme p;
  p.kind = s.kind;
  p.pilot_power = c.frame.pilot_power;
  p.root = c.zc_root;
  p.tau_m = c.tau_m;
  p.nu_m = c.nu_m;
  const int n = c.afdm.n_sub;
  if (s.kind != PilotKind::single) {
    if (s.count < 1 || n % s.count != 0)
      throw ConfigError("scheme '" + s.label + "': Np must divide n_sub");
    const int spacing = n / s.count;
    if (s.kind == PilotKind::proposed) {
      int lq = log2_of(spacing);
      int q = select_c1_q(c.nu_m, c.afdm).q;
      if (lq < q) throw ConfigError("scheme '" + s.label + "': Np too large for nu_m (needs Nc/Np = 2^(q+r))");
      p.r = lq - q;
    } else {
      p.spacing = spacing;
      p.count = s.count;
    }
  }
  return make_pilot(p, c.afdm);
}

// ---- communication sweeps ---------------------------------------------------

CommSweepResult run_comm_sweep(const ExperimentConfig& c) {
  const AfdmConfig& a = c.afdm;
  const int n = a.n_sub;
  const int ns = static_cast<int>(c.schemes.size());
  const int nsnr = static_cast<int>(c.snr_d_db.size());
  BasisGrid grid = BasisGrid::make(c.tau_m, c.nu_m);
  auto ops = basis_operators(grid, a);
  const double prior = c.prior_var > 0 ? c.prior_var : 1.0 / grid.size();
  RVec c_alpha = RVec::Constant(grid.size(), prior);

  std::vector<CVec> pilots;
  std::vector<MmseEstimator> est;
  for (const auto& s : c.schemes) {
    pilots.push_back(scheme_pilot(s, c));
    est.emplace_back(build_psi(pilots.back(), ops), c_alpha);
  }
  const int bps = bits_per_symbol(c.frame.constellation);

  struct Cell {
    double mse = 0, mse1 = 0;
    std::size_t err = 0, err1 = 0;
    bool monotone = true;
  };
  std::vector<std::vector<Cell>> per_trial(c.trials, std::vector<Cell>(ns * nsnr));
  const uint64_t tag = name_tag("comm");

  parallel_for(c.trials, c.threads, [&](int t) {
    auto rng = trial_rng(c.seed, tag, static_cast<uint64_t>(t));
    ChannelRealization ch = sample_channel(c.paths, c.tau_m, c.nu_m, c.noise_power_comm, rng);
    auto bits = random_bits(static_cast<std::size_t>(n) * bps, rng);
    CVec w = complex_noise(n, 1.0, rng);
    CMat h = dense_channel(ch, a);
    FrameSpec unit = c.frame;
    unit.data_symbol_power = 1.0;
    CVec sym = map_bits(bits, n, unit);
    for (int k = 0; k < nsnr; ++k) {
      FrameSpec spec = c.frame;
      spec.data_symbol_power = c.noise_power_comm * undb(c.snr_d_db[k]);
      CVec x_d = sym * std::sqrt(spec.data_symbol_power);
      for (int s = 0; s < ns; ++s) {
        CVec y = apply_channel(ch, pilots[s] + x_d, a) + std::sqrt(c.noise_power_comm) * w;
        auto res = iterative_estimate(y, pilots[s], est[s], ops, spec, c.noise_power_comm, c.iter, &h, &bits);
        Cell& cell = per_trial[t][s * nsnr + k];
        cell.mse = res.iterations.back().mse;
        cell.mse1 = res.iterations.front().mse;
        cell.err = res.iterations.back().bit_errors;
        cell.err1 = res.iterations.front().bit_errors;
        cell.monotone = res.monotone;
      }
    }
  });

  CommSweepResult r;
  r.snr_d_db = c.snr_d_db;
  for (auto& s : c.schemes) r.schemes.push_back(s.label);
  r.bits_per_point = static_cast<long long>(c.trials) * n * bps;
  auto grid2 = [&] { return std::vector<std::vector<double>>(ns, std::vector<double>(nsnr, 0.0)); };
  r.mse = grid2();
  r.mse_sq = grid2();
  r.mse_iter1 = grid2();
  r.ber = grid2();
  r.ber_iter1 = grid2();
  r.monotone_fraction = grid2();
  for (int s = 0; s < ns; ++s)
    for (int k = 0; k < nsnr; ++k) {
      double m = 0, m2 = 0, m1 = 0, mono = 0;
      long long e = 0, e1 = 0;
      for (int t = 0; t < c.trials; ++t) {
        const Cell& cell = per_trial[t][s * nsnr + k];
        m += cell.mse;
        m2 += cell.mse * cell.mse;
        m1 += cell.mse1;
        e += static_cast<long long>(cell.err);
        e1 += static_cast<long long>(cell.err1);
        mono += cell.monotone ? 1 : 0;
      }
      r.mse[s][k] = m / c.trials;
      r.mse_sq[s][k] = m2 / c.trials;
      r.mse_iter1[s][k] = m1 / c.trials;
      r.ber[s][k] = static_cast<double>(e) / r.bits_per_point;
      r.ber_iter1[s][k] = static_cast<double>(e1) / r.bits_per_point;
      r.monotone_fraction[s][k] = mono / c.trials;
      check_finite(r.mse[s][k], "channel MSE");
    }
  return r;
}

// ---- sensing ------------------------------------------------------------------

namespace {

double sensing_data_power(const ExperimentConfig& c) { return c.noise_power_comm * undb(c.sensing_data_snr_db); }

// sigma_s^2 for receive SNR rho = |beta|^2 Pt / (Nc sigma_s^2).
double sensing_noise_power(double pt, int n, double snr_db) { return pt / (n * undb(snr_db)); }

}  // namespace

RocResult run_roc(const ExperimentConfig& c) {
  const AfdmConfig& a = c.afdm;
  const int n = a.n_sub;
  const int ns = static_cast<int>(c.schemes.size());
  const int nsnr = static_cast<int>(c.sensing_snr_db.size());
  std::vector<CVec> pilots;
  for (const auto& s : c.schemes) pilots.push_back(scheme_pilot(s, c));
  const double sd2 = sensing_data_power(c);
  const double pt = c.frame.pilot_power + n * sd2;
  FrameSpec unit = c.frame;
  unit.data_symbol_power = 1.0;

  // [trial][snr * ns + scheme]
  std::vector<std::vector<RocTrial>> per_trial(c.trials);
  const uint64_t tag = name_tag("roc");
  parallel_for(c.trials, c.threads, [&](int t) {
    auto rng = trial_rng(c.seed, tag, static_cast<uint64_t>(t));
    std::uniform_int_distribution<int> dt(0, c.tau_m), dn(-c.nu_m, c.nu_m);
    SensingTarget target;
    target.delay = dt(rng);
    target.doppler = dn(rng);
    target.gain = unit_phase(rng);
    CVec x_d = random_symbols(n, unit, rng) * std::sqrt(sd2);
    CVec w = complex_noise(n, 1.0, rng);
    std::vector<CVec> clean;
    std::vector<CVec> frames;
    for (int s = 0; s < ns; ++s) {
      frames.push_back(pilots[s] + x_d);
      clean.push_back(sensing_echo(frames.back(), target, a, nullptr));
    }
    auto& out = per_trial[t];
    out.resize(nsnr * ns);
    for (int k = 0; k < nsnr; ++k) {
      double s2 = sensing_noise_power(pt, n, c.sensing_snr_db[k]);
      for (int s = 0; s < ns; ++s) {
        CVec r = clean[s] + std::sqrt(s2) * w;
        auto map = rdf(r, frames[s], GridSpec::region(c.tau_m, c.nu_m), a);
        out[k * ns + s] = roc_trial_stats(map, c.window, target.delay, target.doppler);
      }
    }
  });

  RocResult res;
  res.snr_db = c.sensing_snr_db;
  for (auto& s : c.schemes) res.schemes.push_back(s.label);
  res.gamma = log_grid(c.gamma_lo, c.gamma_hi, c.gamma_points);
  res.pfa_levels = log_grid(1e-2, 1.0, c.pfa_points);
  res.curves.assign(nsnr, std::vector<std::vector<RocPoint>>(ns));
  res.pd_at_levels.assign(nsnr, std::vector<std::vector<double>>(ns));
  for (int k = 0; k < nsnr; ++k)
    for (int s = 0; s < ns; ++s) {
      std::vector<RocTrial> trials;
      trials.reserve(c.trials);
      for (int t = 0; t < c.trials; ++t) trials.push_back(std::move(per_trial[t][k * ns + s]));
      res.curves[k][s] = roc_curve(trials, res.gamma);
      res.pd_at_levels[k][s] = pd_at_pfa(res.curves[k][s], res.pfa_levels);
    }
  return res;
}

CrbRmseResult run_crb_rmse(const ExperimentConfig& c) {
  const AfdmConfig& a = c.afdm;
  const int n = a.n_sub;
  const int nsnr = static_cast<int>(c.sensing_snr_db.size());
  const SchemeSpec& scheme = c.schemes.front();
  CVec x_p = scheme_pilot(scheme, c);
  const double sd2 = sensing_data_power(c);
  const double pt = c.frame.pilot_power + n * sd2;
  FrameSpec unit = c.frame;
  unit.data_symbol_power = 1.0;
  RVec power = x_p.cwiseAbs2() + RVec::Constant(n, sd2);

  struct Cell {
    double et, en, et_arg, en_arg;
    double crb_tau, crb_nu;
  };
  std::vector<std::vector<Cell>> per_trial(c.trials, std::vector<Cell>(nsnr));
  const uint64_t tag = name_tag("crb_rmse");
  parallel_for(c.trials, c.threads, [&](int t) {
    auto rng = trial_rng(c.seed, tag, static_cast<uint64_t>(t));
    std::uniform_real_distribution<double> dt(0.0, c.tau_m), dn(-c.nu_m, c.nu_m);
    SensingTarget target;
    target.delay = dt(rng);
    target.doppler = dn(rng);
    target.gain = unit_phase(rng);
    CVec x = x_p + random_symbols(n, unit, rng) * std::sqrt(sd2);
    CVec w = complex_noise(n, 1.0, rng);
    CVec clean = sensing_echo(x, target, a, nullptr);
    for (int k = 0; k < nsnr; ++k) {
      double s2 = sensing_noise_power(pt, n, c.sensing_snr_db[k]);
      CVec r = clean + std::sqrt(s2) * w;
      auto map = fine_map(r, x, c.tau_m, c.nu_m, c.tau_os, c.nu_os, a);
      auto peak = estimate_target(map);
      TargetEstimate est = peak;
      if (c.peak_refine == "parabolic") est = refine_peak(map, peak);
      if (c.peak_refine == "local")
        est = local_peak_search(r, x, peak, 1.0 / c.tau_os, 1.0 / c.nu_os, c.tau_m, a);
      SensingTarget tb = target;
      tb.noise_power = s2;
      auto b = crb(power, tb, a);
      per_trial[t][k] = {est.tau - target.delay, est.nu - target.doppler, peak.tau - target.delay,
                         peak.nu - target.doppler, b.crb_tau, b.crb_nu};
    }
  });

  CrbRmseResult res;
  res.scheme = scheme.label;
  for (const auto& v : c.variants) {
    AfdmConfig av = a;
    if (v == "ts_half") av.delta_f = 2 * a.delta_f;
    if (v == "df_half") av.delta_f = 0.5 * a.delta_f;
    const double kr = kSpeedOfLight * av.t_s() / 2;
    const double kv = kSpeedOfLight * av.delta_f / (2 * av.f_c);
    for (int k = 0; k < nsnr; ++k) {
      double st = 0, sn = 0, sta = 0, sna = 0, ct = 0, cn = 0;
      for (int t = 0; t < c.trials; ++t) {
        const Cell& e = per_trial[t][k];
        st += e.et * e.et;
        sn += e.en * e.en;
        sta += e.et_arg * e.et_arg;
        sna += e.en_arg * e.en_arg;
        ct += e.crb_tau;
        cn += e.crb_nu;
      }
      CrbRmseRow row;
      row.variant = v;
      row.snr_db = c.sensing_snr_db[k];
      row.delta_f = av.delta_f;
      row.t_s = av.t_s();
      row.rmse_tau = std::sqrt(st / c.trials);
      row.rmse_nu = std::sqrt(sn / c.trials);
      row.rmse_tau_argmax = std::sqrt(sta / c.trials);
      row.rmse_nu_argmax = std::sqrt(sna / c.trials);
      row.sqrt_crb_tau = std::sqrt(ct / c.trials);
      row.sqrt_crb_nu = std::sqrt(cn / c.trials);
      row.rmse_R = kr * row.rmse_tau;
      row.rmse_V = kv * row.rmse_nu;
      row.rmse_R_argmax = kr * row.rmse_tau_argmax;
      row.rmse_V_argmax = kv * row.rmse_nu_argmax;
      row.sqrt_crb_R = kr * row.sqrt_crb_tau;
      row.sqrt_crb_V = kv * row.sqrt_crb_nu;
      check_finite(row.sqrt_crb_tau, "CRB");
      res.rows.push_back(row);
    }
  }
  return res;
}

// ---- ambiguity statistics -------------------------------------------------------

AfSurfaceResult run_af_surface(const ExperimentConfig& c) {
  const AfdmConfig& a = c.afdm;
  const int n = a.n_sub;
  const SchemeSpec& scheme = c.schemes.front();
  CVec x_p = scheme_pilot(scheme, c);
  CVec s_p = idaft(x_p, a);
  const double sd2 = sensing_data_power(c);
  FrameSpec spec = c.frame;
  spec.pilot_power = x_p.squaredNorm();
  spec.data_symbol_power = sd2;
  const int np = static_cast<int>(c.af_points.size());

  std::vector<std::vector<cd>> per_trial(c.trials, std::vector<cd>(np));
  const uint64_t tag = name_tag("af_surface");
  parallel_for(c.trials, c.threads, [&](int t) {
    auto rng = trial_rng(c.seed, tag, static_cast<uint64_t>(t));
    CVec s = idaft(x_p + random_symbols(n, spec, rng), a);
    for (int k = 0; k < np; ++k) per_trial[t][k] = ambiguity(s, c.af_points[k].first, c.af_points[k].second);
  });

  AfSurfaceResult res;
  res.scheme = scheme.label;
  const double nt = c.trials;
  for (int k = 0; k < np; ++k) {
    AfPointStats st{};
    st.tau = c.af_points[k].first;
    st.nu = c.af_points[k].second;
    cd chi_p = ambiguity(s_p, st.tau, st.nu);
    st.chi_p_abs = std::abs(chi_p);
    cd mean = 0;
    for (int t = 0; t < c.trials; ++t) mean += per_trial[t][k];
    mean /= nt;
    double v = 0, v4 = 0;
    for (int t = 0; t < c.trials; ++t) {
      double d2 = std::norm(per_trial[t][k] - mean);
      v += d2;
      v4 += d2 * d2;
    }
    st.mc_mean = mean;
    st.mc_var = c.trials > 1 ? v / (nt - 1) : 0.0;
    st.se_mean = std::sqrt(st.mc_var / nt);
    st.se_var = std::sqrt(std::max(0.0, v4 / nt - st.mc_var * st.mc_var) / nt);
    bool origin = st.tau % n == 0 && st.nu % n == 0;
    auto cf = af_statistics_closed_form(spec, n, origin, chi_p);
    st.cf_mean = cf.mean;
    st.cf_var = cf.variance;
    res.points.push_back(st);
  }
  return res;
}

// ---- CRB distribution ----------------------------------------------------------------

CrbPdfResult run_crb_pdf(const ExperimentConfig& c) {
  const int n = c.afdm.n_sub;
  CrbPdfResult res;
  SensingTarget target;
  target.delay = c.crb_tau;
  target.gain = 1.0;
  target.noise_power = 1.0;
  const double pt = n;
  for (const auto& w : c.waveforms) {
    AfdmConfig a = c.afdm;
    if (w == "afdm") a.c1 = (2.0 * c.nu_m + 1) / (2.0 * n);
    if (w == "ocdm") a.c1 = 1.0 / (2.0 * n);
    if (w == "ofdm") a.c1 = 0.0;
    res.waveforms.push_back(w);
    res.c1.push_back(a.c1);
    RVec wt = sensing_weights(pt, target, a);
    res.weights.push_back(wt);
    res.weight_spread.push_back(wt.maxCoeff() - wt.minCoeff());
    // same allocation draws for every waveform
    auto rng = trial_rng(c.seed, name_tag("crb_pdf"), 0);
    auto d = crb_distribution(pt, target, a, c.crb_draws, rng);
    res.crb_mean.push_back(d.mean);
    res.crb_var.push_back(d.variance);
    res.crb_equal.push_back(d.equal_allocation);
    res.tail_mass.push_back(d.tail_mass);
    res.samples.push_back(std::move(d.samples));
  }
  // histogram over [min, 99th percentile of the pooled samples]
  std::vector<double> pooled;
  for (auto& s : res.samples) pooled.insert(pooled.end(), s.begin(), s.end());
  if (!pooled.empty()) {
    std::sort(pooled.begin(), pooled.end());
    double lo = pooled.front();
    double hi = pooled[static_cast<std::size_t>(0.99 * (pooled.size() - 1))];
    if (!(hi > lo)) hi = lo + 1;
    const int nb = c.crb_bins;
    const double width = (hi - lo) / nb;
    for (int b = 0; b <= nb; ++b) res.bin_edges.push_back(lo + b * width);
    for (auto& s : res.samples) {
      std::vector<double> dens(nb, 0.0);
      for (double v : s) {
        int b = static_cast<int>((v - lo) / width);
        if (b == nb && v <= hi) b = nb - 1;
        if (b >= 0 && b < nb) dens[b] += 1;
      }
      for (auto& d : dens) d /= s.size() * width;
      res.density.push_back(dens);
    }
  }
  return res;
}

// ---- theorem checks ---------------------------------------------------------------

TheoremCheckResult run_theorem_checks(const ExperimentConfig& c) {
  const AfdmConfig& a = c.afdm;
  const int n = a.n_sub;
  const double sp2 = c.frame.pilot_power;
  TheoremCheckResult res;
  auto add = [&](std::string name, double v, double thr, bool pass) {
    res.rows.push_back({std::move(name), v, thr, pass});
  };

  auto l0 = proposed_layout(a, c.nu_m, 0);
  double worst = 0;
  for (int r = 0; r <= l0.p - l0.q; ++r) {
    auto l = proposed_layout(a, c.nu_m, r);
    CVec s = idaft(proposed_pilot(a, c.nu_m, r, sp2, c.zc_root), a);
    worst = std::max(worst, max_sidelobe(s, l.spacing / a.k1() - 1, c.nu_m));
  }
  add("ideal_af_max_sidelobe", worst / sp2, 1e-10, worst <= 1e-10 * sp2);

  CVec raw = idaft(raw_zc_pilot(a, 1, sp2, c.zc_root), a);
  auto cx = max_sidelobe_where(raw, l0.spacing / a.k1() - 1, c.nu_m, true);
  add("no_psi_counterexample_sidelobe", cx.value / sp2, 1e-3, cx.value > 1e-3 * sp2);

  BasisGrid grid = BasisGrid::make(c.tau_m, c.nu_m);
  int r_ok = -1;
  for (int r = 0; r <= l0.p - l0.q; ++r)
    if ((1 << (l0.q + r)) / a.k1() > c.tau_m) {
      r_ok = r;
      break;
    }
  if (r_ok >= 0) {
    auto t4 = verify_theorem_4(proposed_pilot(a, c.nu_m, r_ok, sp2, c.zc_root), grid, a);
    add("gram_max_offdiag", t4.max_offdiag / sp2, 1e-10, t4.max_offdiag <= 1e-10 * sp2);
  }
  auto rng = trial_rng(c.seed, name_tag("theorem_checks"), 0);
  CVec rp = complex_noise(n, sp2 / n, rng);
  auto t4r = verify_theorem_4(rp, grid, a);
  add("gram_identity_error_random_pilot", t4r.max_identity_error, 1e-9, t4r.max_identity_error <= 1e-9);

  const double pd = n * sensing_data_power(c);
  auto t2 = verify_theorem_2(a, sp2, pd, c.trials, rng);
  add("qam16_minus_qpsk_origin_variance", t2.var_qam_origin - t2.var_qpsk_origin, 0, t2.holds);

  std::vector<int> ns = {64, 128, 256, 512};
  auto t3 = verify_theorem_3(ns, sp2, pd, std::min(c.trials, 2000), rng);
  add("origin_variance_slope", t3.slope_closed_form, -1, std::abs(t3.slope_closed_form + 1) <= 0.1);
  add("origin_variance_slope_mc", t3.slope_mc, -1, std::abs(t3.slope_mc + 1) <= 0.1);
  return res;
}

}  // namespace afdm
