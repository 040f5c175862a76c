#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "afdm/experiment.hpp"

namespace afdm {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

double parse_number(const std::string& key, const std::string& raw) {
  std::string v = trim(raw);
  if (v == "pi-3") return kPi - 3.0;
  if (v == "inf") return std::numeric_limits<double>::infinity();
  auto slash = v.find('/');
  try {
    std::size_t used = 0;
    if (slash != std::string::npos) {
      double a = std::stod(v.substr(0, slash), &used);
      if (used != slash) throw std::invalid_argument(v);
      std::string den = v.substr(slash + 1);
      double b = std::stod(den, &used);
      if (used != den.size() || b == 0) throw std::invalid_argument(v);
      return a / b;
    }
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not a number: '" + raw + "'");
  }
}

long long parse_integer(const std::string& key, const std::string& raw) {
  double x = parse_number(key, raw);
  if (!std::isfinite(x) || x != std::floor(x) || std::abs(x) > 9e15)
    throw ConfigError("key '" + key + "': not an integer: '" + raw + "'");
  return static_cast<long long>(x);
}

// comma list; each item is a number or start:step:stop
std::vector<double> parse_axis(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  if (trim(raw).empty()) return out;
  for (const auto& item : split(raw, ',')) {
    auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(parse_number(key, parts[0]));
    } else if (parts.size() == 3) {
      double a = parse_number(key, parts[0]), step = parse_number(key, parts[1]),
             b = parse_number(key, parts[2]);
      if (step == 0 || (b - a) / step < 0) throw ConfigError("key '" + key + "': bad range '" + item + "'");
      long long n = static_cast<long long>(std::floor((b - a) / step + 1e-9));
      if (n > 100000) throw ConfigError("key '" + key + "': range too long");
      for (long long k = 0; k <= n; ++k) out.push_back(a + k * step);
    } else {
      throw ConfigError("key '" + key + "': bad axis item '" + item + "'");
    }
  }
  return out;
}

std::vector<std::string> parse_names(const std::string& raw) {
  std::vector<std::string> out;
  if (trim(raw).empty()) return out;
  for (auto& s : split(raw, ',')) {
    if (s.empty()) throw ConfigError("empty list item in '" + raw + "'");
    out.push_back(s);
  }
  return out;
}

const std::map<std::string, ConfigMap>& preset_table() {
  static const std::map<std::string, ConfigMap> t = {
      {"table1-small", {{"tau_m", "2"}}},
      {"table1-large", {{"tau_m", "15"}}},
      {"desk", {{"n_sub", "64"}, {"n_cpp", "16"}, {"tau_m", "2"}, {"trials", "1000"}}},
      {"fig4", {{"n_sub", "16"}, {"n_cpp", "4"}, {"tau_m", "2"}, {"crb_draws", "10000"}}},
      {"fig5", {{"tau_m", "2"}, {"schemes", "single,spi:8,proposed:8,proposed:16"}}},
      {"fig6", {{"tau_m", "15"}, {"schemes", "single,spi:8,proposed:8,proposed:16"}}},
      {"fig7", {{"tau_m", "2"}, {"schemes", "single,spi:8,proposed:8,proposed:16"}}},
      {"fig8", {{"tau_m", "15"}, {"schemes", "single,spi:8,proposed:8,proposed:16"}}},
      {"fig9", {{"tau_m", "15"}, {"schemes", "proposed:8,spi:8"}, {"sensing_snr_db", "0,-10"}}},
      {"fig10", {{"tau_m", "15"}, {"schemes", "proposed:8"}, {"sensing_snr_db", "10:5:30"}}},
  };
  return t;
}

}  // namespace

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::mse_sweep: return "mse_sweep";
    case Scenario::ber_sweep: return "ber_sweep";
    case Scenario::roc: return "roc";
    case Scenario::crb_rmse: return "crb_rmse";
    case Scenario::af_surface: return "af_surface";
    case Scenario::crb_pdf: return "crb_pdf";
    case Scenario::theorem_checks: return "theorem_checks";
  }
  return "?";
}

std::vector<std::string> scenario_names() {
  return {"mse_sweep", "ber_sweep", "roc", "crb_rmse", "af_surface", "crb_pdf", "theorem_checks"};
}

Scenario parse_scenario(const std::string& s) {
  const Scenario all[] = {Scenario::mse_sweep, Scenario::ber_sweep, Scenario::roc, Scenario::crb_rmse,
                          Scenario::af_surface, Scenario::crb_pdf, Scenario::theorem_checks};
  for (auto sc : all)
    if (s == scenario_name(sc)) return sc;
  std::string names;
  for (auto& n : scenario_names()) names += (names.empty() ? "" : ", ") + n;
  throw ConfigError("unknown scenario '" + s + "' (available: " + names + ")");
}

SchemeSpec parse_scheme(const std::string& raw) {
  SchemeSpec s;
  s.label = trim(raw);
  auto parts = split(s.label, ':');
  if (parts.empty() || parts.size() > 2) throw ConfigError("bad scheme '" + raw + "'");
  if (parts[0] == "spi") parts[0] = "traditional_spi";
  try {
    s.kind = parse_pilot_kind(parts[0]);
  } catch (const std::exception&) {
    throw ConfigError("bad scheme '" + raw + "' (use single, spi:Np, proposed:Np, raw_zc:Np)");
  }
  if (parts.size() == 2) {
    long long c = parse_integer("schemes", parts[1]);
    if (c < 1) throw ConfigError("bad pilot count in scheme '" + raw + "'");
    s.count = static_cast<int>(c);
  }
  if (s.kind != PilotKind::single && s.count == 0)
    throw ConfigError("scheme '" + raw + "' needs a pilot count, e.g. " + parts[0] + ":8");
  return s;
}

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap m;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string k = trim(line.substr(0, eq));
    if (k.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    m[k] = trim(line.substr(eq + 1));
  }
  auto it = m.find("schema_version");
  if (it == m.end()) throw ConfigError("config file must set schema_version");
  if (parse_integer("schema_version", it->second) != kConfigSchemaVersion)
    throw ConfigError("unsupported schema_version " + it->second + " (expected " +
                      std::to_string(kConfigSchemaVersion) + ")");
  return m;
}

ConfigMap read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

void apply_override(ConfigMap& m, const std::string& kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + kv + "' is not key=value");
  std::string k = trim(kv.substr(0, eq));
  if (k.empty()) throw ConfigError("override '" + kv + "' has an empty key");
  m[k] = trim(kv.substr(eq + 1));
}

ConfigMap default_config() {
  return {
      {"schema_version", "1"},
      {"n_sub", "128"},
      {"n_cpp", "32"},
      {"c1", "auto"},
      {"c2", "pi-3"},
      {"delta_f", "100e3"},
      {"f_c", "28e9"},
      {"pilot_power_db", "20"},
      {"constellation", "qpsk"},
      {"zc_root", "1"},
      {"schemes", "proposed:8"},
      {"paths", "3"},
      {"tau_m", "2"},
      {"nu_m", "2"},
      {"noise_total_dbm", "21"},
      {"noise_power_comm", "auto"},
      {"prior_var", "auto"},
      {"n_iter", "2"},
      {"eps_factor", "3"},
      {"restrict_support", "0"},
      {"snr_d_db", "6:3:30"},
      {"sensing_snr_db", "0,-10"},
      {"sensing_data_snr_db", "20"},
      {"tau_os", "8"},
      {"nu_os", "8"},
      {"peak_refine", "local"},
      {"guard", "1"},
      {"window_tau", "2"},
      {"window_nu", "2"},
      {"gamma_points", "400"},
      {"gamma_lo", "1e-2"},
      {"gamma_hi", "1e4"},
      {"pfa_points", "21"},
      {"variants", "base,ts_half,df_half"},
      {"af_points", "0:0,1:0,0:1,2:-3,-4:2,5:4"},
      {"waveforms", "afdm,ocdm,ofdm"},
      {"crb_tau", "1.5"},
      {"crb_draws", "10000"},
      {"crb_bins", "50"},
      {"trials", "1000"},
      {"seed", "1"},
  };
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (auto& [k, v] : preset_table()) out.push_back(k);
  return out;
}

ConfigMap preset(const std::string& name) {
  auto it = preset_table().find(name);
  if (it == preset_table().end()) {
    std::string names;
    for (auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + name + "' (available: " + names + ")");
  }
  ConfigMap m = default_config();
  for (auto& [k, v] : it->second) m[k] = v;
  return m;
}

ExperimentConfig build_config(Scenario scenario, const ConfigMap& in) {
  ConfigMap m = default_config();
  const ConfigMap defaults = m;
  std::string preset_name;
  for (auto& [k, v] : in) {
    if (k == "preset") {
      preset_name = v;
      continue;
    }
    if (!defaults.count(k)) throw ConfigError("unknown config key '" + k + "'");
    m[k] = v;
  }
  if (parse_integer("schema_version", m["schema_version"]) != kConfigSchemaVersion)
    throw ConfigError("unsupported schema_version " + m["schema_version"]);

  auto num = [&](const char* k) { return parse_number(k, m[k]); };
  auto integer = [&](const char* k) { return static_cast<int>(parse_integer(k, m[k])); };

  ExperimentConfig c;
  c.scenario = scenario;
  c.preset = preset_name;
  c.tau_m = integer("tau_m");
  c.nu_m = integer("nu_m");
  if (c.tau_m < 0 || c.nu_m < 0) throw ConfigError("tau_m and nu_m must be non-negative");

  c.afdm.n_sub = integer("n_sub");
  c.afdm.n_cpp = integer("n_cpp");
  c.afdm.c2 = num("c2");
  c.afdm.delta_f = num("delta_f");
  c.afdm.f_c = num("f_c");
  if (!(c.afdm.delta_f > 0) || !(c.afdm.f_c > 0)) throw ConfigError("delta_f and f_c must be positive");
  if (m["c1"] == "auto") {
    c.afdm.c1 = 0;
    c.afdm.c1 = select_c1_q(c.nu_m, c.afdm).c1;
  } else {
    c.afdm.c1 = num("c1");
  }
  c.afdm.validate();

  c.frame.pilot_power = std::pow(10.0, num("pilot_power_db") / 10.0);
  try {
    c.frame.constellation = parse_constellation(m["constellation"]);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("constellation: ") + e.what());
  }
  c.zc_root = integer("zc_root");
  for (auto& s : parse_names(m["schemes"])) c.schemes.push_back(parse_scheme(s));
  if (c.schemes.empty()) throw ConfigError("schemes must not be empty");
  {
    std::set<std::string> seen;
    for (auto& s : c.schemes)
      if (!seen.insert(s.label).second) throw ConfigError("duplicate scheme '" + s.label + "'");
  }

  c.paths = integer("paths");
  if (m["noise_power_comm"] == "auto")
    c.noise_power_comm = std::pow(10.0, (num("noise_total_dbm") - 30.0) / 10.0) / c.afdm.n_sub;
  else
    c.noise_power_comm = num("noise_power_comm");
  if (!(c.noise_power_comm > 0)) throw ConfigError("noise_power_comm must be positive");
  c.prior_var = m["prior_var"] == "auto" ? 0.0 : num("prior_var");
  if (c.prior_var < 0) throw ConfigError("prior_var must be positive or auto");
  c.iter.n_iter = integer("n_iter");
  c.iter.eps_factor = num("eps_factor");
  {
    long long rs = parse_integer("restrict_support", m["restrict_support"]);
    if (rs != 0 && rs != 1) throw ConfigError("restrict_support must be 0 or 1");
    c.iter.restrict_support = rs == 1;
  }
  if (c.iter.n_iter < 1) throw ConfigError("n_iter must be at least 1");
  if (c.iter.eps_factor < 0) throw ConfigError("eps_factor must be non-negative");
  c.snr_d_db = parse_axis("snr_d_db", m["snr_d_db"]);

  c.sensing_snr_db = parse_axis("sensing_snr_db", m["sensing_snr_db"]);
  c.sensing_data_snr_db = num("sensing_data_snr_db");
  c.tau_os = integer("tau_os");
  c.nu_os = integer("nu_os");
  if (c.tau_os < 1 || c.nu_os < 1) throw ConfigError("oversampling factors must be at least 1");
  c.peak_refine = m["peak_refine"];
  if (c.peak_refine != "none" && c.peak_refine != "parabolic" && c.peak_refine != "local")
    throw ConfigError("peak_refine must be none, parabolic or local");
  c.window.guard = integer("guard");
  c.window.half_tau = integer("window_tau");
  c.window.half_nu = integer("window_nu");
  if (c.window.guard < 0 || c.window.half_tau < c.window.guard || c.window.half_nu < c.window.guard)
    throw ConfigError("noise window half-widths must be at least the guard");
  c.gamma_points = integer("gamma_points");
  c.gamma_lo = num("gamma_lo");
  c.gamma_hi = num("gamma_hi");
  if (c.gamma_points < 2 || !(c.gamma_lo > 0) || !(c.gamma_hi > c.gamma_lo))
    throw ConfigError("gamma grid needs gamma_points >= 2 and 0 < gamma_lo < gamma_hi");
  c.pfa_points = integer("pfa_points");
  if (c.pfa_points < 2) throw ConfigError("pfa_points must be at least 2");
  c.variants = parse_names(m["variants"]);
  for (auto& v : c.variants)
    if (v != "base" && v != "ts_half" && v != "df_half")
      throw ConfigError("unknown variant '" + v + "' (base, ts_half, df_half)");

  for (auto& item : parse_names(m["af_points"])) {
    auto p = split(item, ':');
    if (p.size() != 2) throw ConfigError("af_points item '" + item + "' is not tau:nu");
    c.af_points.emplace_back(static_cast<int>(parse_integer("af_points", p[0])),
                             static_cast<int>(parse_integer("af_points", p[1])));
  }
  c.waveforms = parse_names(m["waveforms"]);
  for (auto& w : c.waveforms)
    if (w != "afdm" && w != "ocdm" && w != "ofdm") throw ConfigError("unknown waveform '" + w + "'");
  c.crb_tau = num("crb_tau");
  c.crb_draws = integer("crb_draws");
  c.crb_bins = integer("crb_bins");
  if (c.crb_draws < 1 || c.crb_bins < 1) throw ConfigError("crb_draws and crb_bins must be positive");

  c.trials = integer("trials");
  if (c.trials < 1) throw ConfigError("trials must be at least 1");
  long long seed = parse_integer("seed", m["seed"]);
  if (seed < 0) throw ConfigError("seed must be non-negative");
  c.seed = static_cast<uint64_t>(seed);

  // scenario-specific requirements
  bool comm = scenario == Scenario::mse_sweep || scenario == Scenario::ber_sweep;
  if (comm && c.snr_d_db.empty()) throw ConfigError("snr_d_db must not be empty");
  if ((scenario == Scenario::roc || scenario == Scenario::crb_rmse) && c.sensing_snr_db.empty())
    throw ConfigError("sensing_snr_db must not be empty");
  if (scenario == Scenario::crb_rmse && c.variants.empty()) throw ConfigError("variants must not be empty");
  if (comm || scenario == Scenario::roc || scenario == Scenario::crb_rmse) c.afdm.check_delay_budget(c.tau_m);
  if (comm) {
    int lm = (2 * c.nu_m + 1) * (c.tau_m + 1);
    if (c.paths < 1 || c.paths > lm) throw ConfigError("paths must be in [1, L_m]");
  }

  if (scenario == Scenario::roc &&
      (2 * c.window.half_tau + 1 > c.tau_m + 1 || 2 * c.window.half_nu + 1 > 2 * c.nu_m + 1))
    throw ConfigError("noise window does not fit the [0, tau_m] x [-nu_m, nu_m] search grid");
  if (scenario != Scenario::crb_pdf) {
    if (c.schemes.empty()) throw ConfigError("schemes must not be empty");
    for (const auto& s : c.schemes) scheme_pilot(s, c);
  }

  c.echo = m;
  if (!preset_name.empty()) c.echo["preset"] = preset_name;
  c.echo["scenario"] = scenario_name(scenario);
  return c;
}

ExperimentConfig preset_config(Scenario scenario, const std::string& name) {
  ConfigMap m = preset(name);
  m["preset"] = name;
  return build_config(scenario, m);
}

}  // namespace afdm
