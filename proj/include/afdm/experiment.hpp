#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "afdm/config.hpp"
#include "afdm/estimator.hpp"
#include "afdm/modem.hpp"
#include "afdm/pilots.hpp"
#include "afdm/sensing.hpp"

namespace afdm {

enum class Scenario { mse_sweep, ber_sweep, roc, crb_rmse, af_surface, crb_pdf, theorem_checks };

const char* scenario_name(Scenario s);
Scenario parse_scenario(const std::string& s);
std::vector<std::string> scenario_names();

constexpr int kConfigSchemaVersion = 1;

using ConfigMap = std::map<std::string, std::string>;

// "proposed:8", "spi:8", "single", "raw_zc:16". The number is Np.
struct SchemeSpec {
  PilotKind kind = PilotKind::proposed;
  int count = 0;
  std::string label;
};

SchemeSpec parse_scheme(const std::string& s);

struct ExperimentConfig {
  Scenario scenario = Scenario::mse_sweep;
  std::string preset;
  AfdmConfig afdm;
  FrameSpec frame;
  int zc_root = 1;
  std::vector<SchemeSpec> schemes;

  int paths = 3;
  int tau_m = 2;
  int nu_m = 2;
  double noise_power_comm = 0;  // sigma_cn^2 per subcarrier
  double prior_var = 0;         // <= 0 selects 1/L_m
  IterativeOptions iter;
  std::vector<double> snr_d_db;

  std::vector<double> sensing_snr_db;
  double sensing_data_snr_db = 20;
  int tau_os = 8;
  int nu_os = 8;
  std::string peak_refine = "local";  // none | parabolic | local
  NoiseWindow window;
  int gamma_points = 400;
  double gamma_lo = 1e-2;
  double gamma_hi = 1e4;
  int pfa_points = 21;
  std::vector<std::string> variants;

  std::vector<std::pair<int, int>> af_points;

  std::vector<std::string> waveforms;
  double crb_tau = 1.5;
  int crb_draws = 10000;
  int crb_bins = 50;

  int trials = 1000;
  uint64_t seed = 1;
  int threads = 0;

  ConfigMap echo;  // the resolved key=value set, for output metadata
};

// key = value lines, '#' comments, blank lines ignored.
ConfigMap parse_config_text(const std::string& text);
ConfigMap read_config_file(const std::string& path);
void apply_override(ConfigMap& m, const std::string& key_value);

std::vector<std::string> preset_names();
// Throws ConfigError listing the available names.
ConfigMap preset(const std::string& name);
// Defaults for every key; presets and files are layered on top.
ConfigMap default_config();

ExperimentConfig build_config(Scenario scenario, const ConfigMap& m);

// DAFT-domain pilot for one scheme under the configured grid and power.
// Throws ConfigError when the scheme does not fit n_sub or nu_m.
CVec scheme_pilot(const SchemeSpec& s, const ExperimentConfig& c);
ExperimentConfig preset_config(Scenario scenario, const std::string& name);

// ---- typed results --------------------------------------------------------

struct CommSweepResult {
  std::vector<double> snr_d_db;
  std::vector<std::string> schemes;
  // [scheme][snr]
  std::vector<std::vector<double>> mse;        // mean Frobenius norm of the error
  std::vector<std::vector<double>> mse_sq;     // mean squared Frobenius norm
  std::vector<std::vector<double>> mse_iter1;  // first-iteration Frobenius norm
  std::vector<std::vector<double>> ber;
  std::vector<std::vector<double>> ber_iter1;
  std::vector<std::vector<double>> monotone_fraction;
  long long bits_per_point = 0;
};

struct RocResult {
  std::vector<double> snr_db;
  std::vector<std::string> schemes;
  std::vector<double> gamma;
  std::vector<double> pfa_levels;
  // [snr][scheme]
  std::vector<std::vector<std::vector<RocPoint>>> curves;
  std::vector<std::vector<std::vector<double>>> pd_at_levels;
};

struct CrbRmseRow {
  std::string variant;
  double snr_db;
  double delta_f, t_s;
  double rmse_tau, rmse_nu;
  double rmse_tau_argmax, rmse_nu_argmax;
  double sqrt_crb_tau, sqrt_crb_nu;
  double rmse_R, rmse_V, sqrt_crb_R, sqrt_crb_V;
  double rmse_R_argmax, rmse_V_argmax;
};

struct CrbRmseResult {
  std::string scheme;
  std::vector<CrbRmseRow> rows;
};

struct AfPointStats {
  int tau, nu;
  double chi_p_abs;
  cd mc_mean;
  double mc_var;
  double se_mean;  // standard error of each mean component
  double se_var;
  cd cf_mean;
  double cf_var;
};

struct AfSurfaceResult {
  std::string scheme;
  std::vector<AfPointStats> points;
};

struct CrbPdfResult {
  std::vector<std::string> waveforms;
  std::vector<double> c1;
  std::vector<RVec> weights;  // per waveform, length Nc
  std::vector<double> weight_spread;  // max - min
  std::vector<double> crb_mean, crb_var, crb_equal, tail_mass;
  std::vector<std::vector<double>> samples;
  // shared histogram edges over all waveforms, density per waveform
  std::vector<double> bin_edges;
  std::vector<std::vector<double>> density;
};

struct TheoremCheckRow {
  std::string check;
  double value;
  double threshold;
  bool pass;
};

struct TheoremCheckResult {
  std::vector<TheoremCheckRow> rows;
};

CommSweepResult run_comm_sweep(const ExperimentConfig& cfg);
RocResult run_roc(const ExperimentConfig& cfg);
CrbRmseResult run_crb_rmse(const ExperimentConfig& cfg);
AfSurfaceResult run_af_surface(const ExperimentConfig& cfg);
CrbPdfResult run_crb_pdf(const ExperimentConfig& cfg);
TheoremCheckResult run_theorem_checks(const ExperimentConfig& cfg);

// ---- tabular output ---------------------------------------------------------

struct Table {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Metric {
  std::string key;
  double value;
};

struct RunResult {
  Scenario scenario = Scenario::mse_sweep;
  std::vector<Table> tables;  // tables[0] is the primary output
  std::vector<Metric> metrics;
};

RunResult run(const ExperimentConfig& cfg);

std::string format_number(double v);
std::string to_csv(const Table& t);
void emit_csv(const Table& t, const std::string& path);
std::string json_summary(const RunResult& r, const ExperimentConfig& cfg);
void emit_json_summary(const RunResult& r, const ExperimentConfig& cfg, const std::string& path);
// Writes <out>/<table>.csv for each table and <out>/<scenario>_summary.json. Returns the paths.
std::vector<std::string> write_outputs(const RunResult& r, const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace afdm
