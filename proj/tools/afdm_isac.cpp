// afdm-isac <scenario> --preset <name> [--seed N] [--trials N] [--out DIR] [--override key=value ...]

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

#include "afdm/experiment.hpp"

int main(int argc, char** argv) {
  using namespace afdm;
  CLI::App app{"AFDM ISAC numerical lab"};
  std::string scenario, preset_name, config_file, out_dir = "out";
  std::vector<std::string> overrides;
  long long seed = -1, trials = -1;
  int threads = 0;
  bool list = false;
  app.add_option("scenario", scenario, "mse_sweep | ber_sweep | roc | crb_rmse | af_surface | crb_pdf | theorem_checks");
  app.add_option("--preset", preset_name, "named configuration");
  app.add_option("--config", config_file, "key = value file (schema_version = 1), applied after the preset");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--trials", trials, "Monte Carlo trials");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--override", overrides, "key=value, repeatable")->take_all();
  app.add_option("--threads", threads, "worker threads, 0 = all cores");
  app.add_flag("--list", list, "list scenarios and presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (list) {
    std::cout << "scenarios:";
    for (auto& s : scenario_names()) std::cout << ' ' << s;
    std::cout << "\npresets:";
    for (auto& p : preset_names()) std::cout << ' ' << p;
    std::cout << '\n';
    return 0;
  }

  try {
    if (scenario.empty()) throw ConfigError("missing scenario");
    Scenario sc = parse_scenario(scenario);
    ConfigMap m = preset_name.empty() ? default_config() : preset(preset_name);
    if (!config_file.empty())
      for (auto& [k, v] : read_config_file(config_file)) m[k] = v;
    if (seed >= 0) m["seed"] = std::to_string(seed);
    if (trials >= 0) m["trials"] = std::to_string(trials);
    for (auto& o : overrides) apply_override(m, o);
    if (!preset_name.empty()) m["preset"] = preset_name;
    ExperimentConfig cfg = build_config(sc, m);
    cfg.threads = threads;

    auto t0 = std::chrono::steady_clock::now();
    RunResult r = run(cfg);
    auto paths = write_outputs(r, cfg, out_dir);
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (auto& p : paths) std::cout << p << '\n';
    std::cerr << scenario << ": " << cfg.trials << " trials in " << sec << " s\n";
    return 0;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
