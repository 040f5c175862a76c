#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <fftw3.h>
#include <json.hpp>

#include "afdm/experiment.hpp"

namespace afdm {

namespace {

using nlohmann::json;

std::string fmt(double v) { return format_number(v); }

std::string col(const std::string& prefix, const std::string& label) {
  std::string s = prefix + label;
  for (auto& ch : s)
    if (ch == ':') ch = '_';
  return s;
}

double db(double v) { return 10.0 * std::log10(v); }

void metric(RunResult& r, std::string key, double v) { r.metrics.push_back({std::move(key), v}); }

RunResult comm_tables(const ExperimentConfig& c, const CommSweepResult& s) {
  RunResult r;
  r.scenario = c.scenario;
  const bool ber = c.scenario == Scenario::ber_sweep;
  Table main;
  main.name = scenario_name(c.scenario);
  main.header.push_back("snr_d_db");
  for (auto& l : s.schemes) main.header.push_back(col(ber ? "ber_" : "mse_db_", l));
  for (std::size_t k = 0; k < s.snr_d_db.size(); ++k) {
    std::vector<std::string> row{fmt(s.snr_d_db[k])};
    for (std::size_t i = 0; i < s.schemes.size(); ++i) row.push_back(fmt(ber ? s.ber[i][k] : db(s.mse[i][k])));
    main.rows.push_back(row);
  }
  Table detail;
  detail.name = std::string(scenario_name(c.scenario)) + "_detail";
  detail.header = {"snr_d_db",  "scheme",        "mse_norm",  "mse_norm_db", "mse_squared", "mse_squared_db",
                   "mse_iter1_db", "ber",        "ber_iter1", "monotone_fraction"};
  for (std::size_t i = 0; i < s.schemes.size(); ++i)
    for (std::size_t k = 0; k < s.snr_d_db.size(); ++k)
      detail.rows.push_back({fmt(s.snr_d_db[k]), s.schemes[i], fmt(s.mse[i][k]), fmt(db(s.mse[i][k])),
                             fmt(s.mse_sq[i][k]), fmt(db(s.mse_sq[i][k])), fmt(db(s.mse_iter1[i][k])),
                             fmt(s.ber[i][k]), fmt(s.ber_iter1[i][k]), fmt(s.monotone_fraction[i][k])});
  r.tables = {main, detail};
  for (std::size_t i = 0; i < s.schemes.size(); ++i)
    for (std::size_t k = 0; k < s.snr_d_db.size(); ++k) {
      std::string at = "[" + s.schemes[i] + "][" + fmt(s.snr_d_db[k]) + "]";
      metric(r, "mse_db" + at, db(s.mse[i][k]));
      metric(r, "ber" + at, s.ber[i][k]);
    }
  metric(r, "bits_per_point", static_cast<double>(s.bits_per_point));
  return r;
}

RunResult roc_tables(const ExperimentConfig& c, const RocResult& s) {
  RunResult r;
  r.scenario = c.scenario;
  Table main;
  main.name = "roc";
  main.header = {"snr_db", "scheme", "gamma", "pfa", "pd"};
  for (std::size_t k = 0; k < s.snr_db.size(); ++k)
    for (std::size_t i = 0; i < s.schemes.size(); ++i)
      for (const auto& p : s.curves[k][i])
        main.rows.push_back({fmt(s.snr_db[k]), s.schemes[i], fmt(p.gamma), fmt(p.pfa), fmt(p.pd)});
  Table lv;
  lv.name = "roc_pd_at_pfa";
  lv.header = {"snr_db", "pfa"};
  for (auto& l : s.schemes) lv.header.push_back(col("pd_", l));
  for (std::size_t k = 0; k < s.snr_db.size(); ++k)
    for (std::size_t j = 0; j < s.pfa_levels.size(); ++j) {
      std::vector<std::string> row{fmt(s.snr_db[k]), fmt(s.pfa_levels[j])};
      for (std::size_t i = 0; i < s.schemes.size(); ++i) row.push_back(fmt(s.pd_at_levels[k][i][j]));
      lv.rows.push_back(row);
    }
  r.tables = {main, lv};
  for (std::size_t k = 0; k < s.snr_db.size(); ++k)
    for (std::size_t i = 0; i < s.schemes.size(); ++i) {
      std::string at = "[" + s.schemes[i] + "][" + fmt(s.snr_db[k]) + "]";
      metric(r, "pd_at_pfa_0.01" + at, s.pd_at_levels[k][i].front());
      metric(r, "pd_at_pfa_1" + at, s.pd_at_levels[k][i].back());
    }
  return r;
}

RunResult crb_rmse_tables(const ExperimentConfig& c, const CrbRmseResult& s) {
  RunResult r;
  r.scenario = c.scenario;
  Table t;
  t.name = "crb_rmse";
  t.header = {"variant",      "snr_db",        "delta_f",      "t_s",         "rmse_R",        "sqrt_crb_R",
              "rmse_V",       "sqrt_crb_V",    "rmse_tau",     "sqrt_crb_tau", "rmse_nu",      "sqrt_crb_nu",
              "rmse_R_argmax", "rmse_V_argmax", "rmse_tau_argmax", "rmse_nu_argmax"};
  for (const auto& w : s.rows) {
    t.rows.push_back({w.variant, fmt(w.snr_db), fmt(w.delta_f), fmt(w.t_s), fmt(w.rmse_R), fmt(w.sqrt_crb_R),
                      fmt(w.rmse_V), fmt(w.sqrt_crb_V), fmt(w.rmse_tau), fmt(w.sqrt_crb_tau), fmt(w.rmse_nu),
                      fmt(w.sqrt_crb_nu), fmt(w.rmse_R_argmax), fmt(w.rmse_V_argmax), fmt(w.rmse_tau_argmax),
                      fmt(w.rmse_nu_argmax)});
    std::string at = "[" + w.variant + "][" + fmt(w.snr_db) + "]";
    metric(r, "rmse_R_over_sqrt_crb" + at, w.rmse_R / w.sqrt_crb_R);
    metric(r, "rmse_V_over_sqrt_crb" + at, w.rmse_V / w.sqrt_crb_V);
  }
  r.tables = {t};
  return r;
}

RunResult af_tables(const ExperimentConfig& c, const AfSurfaceResult& s) {
  RunResult r;
  r.scenario = c.scenario;
  Table t;
  t.name = "af_surface";
  t.header = {"tau",     "nu",           "chi_p_abs",    "mc_mean_re", "mc_mean_im", "cf_mean_re",
              "cf_mean_im", "se_mean",   "mc_var",       "cf_var",     "se_var",     "mean_z",
              "var_z"};
  for (const auto& p : s.points) {
    double mz = p.se_mean > 0 ? std::abs(p.mc_mean - p.cf_mean) / p.se_mean : 0.0;
    double vz = p.se_var > 0 ? std::abs(p.mc_var - p.cf_var) / p.se_var : 0.0;
    t.rows.push_back({std::to_string(p.tau), std::to_string(p.nu), fmt(p.chi_p_abs), fmt(p.mc_mean.real()),
                      fmt(p.mc_mean.imag()), fmt(p.cf_mean.real()), fmt(p.cf_mean.imag()), fmt(p.se_mean),
                      fmt(p.mc_var), fmt(p.cf_var), fmt(p.se_var), fmt(mz), fmt(vz)});
    std::string at = "[" + std::to_string(p.tau) + "," + std::to_string(p.nu) + "]";
    metric(r, "var_z" + at, vz);
    metric(r, "mean_z" + at, mz);
  }
  r.tables = {t};
  return r;
}

RunResult crb_pdf_tables(const ExperimentConfig& c, const CrbPdfResult& s) {
  RunResult r;
  r.scenario = c.scenario;
  Table pdf;
  pdf.name = "crb_pdf";
  pdf.header = {"crb_lo", "crb_hi"};
  for (auto& w : s.waveforms) pdf.header.push_back("density_" + w);
  for (std::size_t b = 0; b + 1 < s.bin_edges.size(); ++b) {
    std::vector<std::string> row{fmt(s.bin_edges[b]), fmt(s.bin_edges[b + 1])};
    for (auto& d : s.density) row.push_back(fmt(d[b]));
    pdf.rows.push_back(row);
  }
  Table wt;
  wt.name = "crb_pdf_weights";
  wt.header = {"subcarrier"};
  for (auto& w : s.waveforms) wt.header.push_back("weight_" + w);
  if (!s.weights.empty())
    for (Eigen::Index m = 0; m < s.weights.front().size(); ++m) {
      std::vector<std::string> row{std::to_string(m)};
      for (auto& w : s.weights) row.push_back(fmt(w[m]));
      wt.rows.push_back(row);
    }
  Table st;
  st.name = "crb_pdf_stats";
  st.header = {"waveform", "c1", "weight_spread", "crb_mean", "crb_variance", "crb_equal_allocation", "tail_mass"};
  for (std::size_t i = 0; i < s.waveforms.size(); ++i) {
    st.rows.push_back({s.waveforms[i], fmt(s.c1[i]), fmt(s.weight_spread[i]), fmt(s.crb_mean[i]),
                       fmt(s.crb_var[i]), fmt(s.crb_equal[i]), fmt(s.tail_mass[i])});
    metric(r, "weight_spread[" + s.waveforms[i] + "]", s.weight_spread[i]);
    metric(r, "crb_variance[" + s.waveforms[i] + "]", s.crb_var[i]);
  }
  r.tables = {pdf, wt, st};
  return r;
}

RunResult theorem_tables(const ExperimentConfig& c, const TheoremCheckResult& s) {
  RunResult r;
  r.scenario = c.scenario;
  Table t;
  t.name = "theorem_checks";
  t.header = {"check", "value", "threshold", "pass"};
  for (const auto& row : s.rows) {
    t.rows.push_back({row.check, fmt(row.value), fmt(row.threshold), row.pass ? "1" : "0"});
    metric(r, row.check, row.value);
  }
  r.tables = {t};
  return r;
}

json conventions(const ExperimentConfig& c) {
  return {
      {"daft", "A[m,n] = exp(-j2pi(c1 n^2 + mn/Nc + c2 m^2))/sqrt(Nc), unitary"},
      {"prefix", "chirp-periodic prefix of n_cpp samples"},
      {"channel_doppler_phase", "exp(j2pi nu (n - tau)/Nc)"},
      {"echo_doppler_phase", "exp(j2pi nu n/Nc)"},
      {"fractional_delay", "frequency-wrapped chirp model"},
      {"af_delay", "cyclic"},
      {"rdf", "E = sum_n r*[n] s[n - tau] exp(j2pi nu n/Nc)"},
      {"noise_window", {{"guard", c.window.guard}, {"half_tau", c.window.half_tau}, {"half_nu", c.window.half_nu},
                        {"edges", "cyclic"}}},
      {"roc_detection", "peak cell above gamma and within 1 of the true (tau, nu)"},
      {"roc_false_alarm", "fraction of cells outside that neighbourhood above gamma"},
      {"mse", "mean Frobenius norm of H - H_hat; mse_squared is the mean squared norm"},
      {"path_threshold", "|alpha_hat_i| > eps_factor * posterior std"},
      {"mmse_noise", "iteration 1: sigma_cn^2 + sigma_d^2 sum C_alpha; later: sigma_cn^2 + sigma_d^2 tr(posterior)"},
      {"snr_d", "sigma_d^2 / sigma_cn^2"},
      {"sensing_snr", "|beta|^2 Pt / (Nc sigma_s^2)"},
      {"fim_beta_entry", "2 Pt / sigma_s^2"},
      {"oversampling", {{"tau", c.tau_os}, {"nu", c.nu_os}}},
      {"peak_refine", c.peak_refine},
      {"gray_mapping", "QPSK ((1-2b0) + j(1-2b1))/sqrt2; QAM16 I=(b0,b2) Q=(b1,b3), levels 01:+3 00:+1 10:-1 11:-3"},
      {"speed_of_light", kSpeedOfLight},
  };
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

RunResult run(const ExperimentConfig& c) {
  switch (c.scenario) {
    case Scenario::mse_sweep:
    case Scenario::ber_sweep: return comm_tables(c, run_comm_sweep(c));
    case Scenario::roc: return roc_tables(c, run_roc(c));
    case Scenario::crb_rmse: return crb_rmse_tables(c, run_crb_rmse(c));
    case Scenario::af_surface: return af_tables(c, run_af_surface(c));
    case Scenario::crb_pdf: return crb_pdf_tables(c, run_crb_pdf(c));
    case Scenario::theorem_checks: return theorem_tables(c, run_theorem_checks(c));
  }
  throw ConfigError("bad scenario");
}

std::string to_csv(const Table& t) {
  auto field = [](const std::string& f) {
    if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
    std::string q = "\"";
    for (char ch : f) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  };
  std::string out;
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += field(row[i]);
    }
    out += "\r\n";
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

void emit_csv(const Table& t, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << to_csv(t);
}

std::string json_summary(const RunResult& r, const ExperimentConfig& c) {
  json j;
  j["schema"] = "afdm-isac-summary";
  j["schema_version"] = 1;
  j["scenario"] = scenario_name(r.scenario);
  j["preset"] = c.preset;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  json cfg = json::object();
  for (auto& [k, v] : c.echo) cfg[k] = v;
  j["config"] = cfg;
  j["conventions"] = conventions(c);
  json tables = json::array();
  for (auto& t : r.tables) tables.push_back({{"name", t.name}, {"file", t.name + ".csv"}, {"columns", t.header},
                                             {"rows", t.rows.size()}});
  j["tables"] = tables;
  json m = json::object();
  for (auto& x : r.metrics) {
    if (std::isfinite(x.value))
      m[x.key] = x.value;
    else
      m[x.key] = format_number(x.value);
  }
  j["metrics"] = m;
  json ver = json::object();
  ver["afdm_isac"] = "0.1.0";
  ver["config_schema"] = kConfigSchemaVersion;
  ver["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
  ver["fftw"] = std::string(fftw_version);
  j["versions"] = ver;
  return j.dump(2) + "\n";
}

void emit_json_summary(const RunResult& r, const ExperimentConfig& c, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << json_summary(r, c);
}

std::vector<std::string> write_outputs(const RunResult& r, const ExperimentConfig& c, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out_dir + "': " + ec.message());
  std::vector<std::string> paths;
  for (const auto& t : r.tables) {
    std::string p = (fs::path(out_dir) / (t.name + ".csv")).string();
    emit_csv(t, p);
    paths.push_back(p);
  }
  std::string p = (fs::path(out_dir) / (std::string(scenario_name(r.scenario)) + "_summary.json")).string();
  emit_json_summary(r, c, p);
  paths.push_back(p);
  return paths;
}

}  // namespace afdm
