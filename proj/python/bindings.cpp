#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "afdm/analysis.hpp"
#include "afdm/daft.hpp"
#include "afdm/experiment.hpp"
#include "afdm/pilots.hpp"

namespace py = pybind11;
using namespace afdm;

namespace {

// Scenario run driven by the same preset/override path as the CLI.
py::dict run_scenario(const std::string& scenario, const std::string& preset_name,
                      const std::map<std::string, std::string>& overrides, long long seed, long long trials,
                      int threads) {
  Scenario s = parse_scenario(scenario);
  ConfigMap m = preset_name.empty() ? default_config() : preset(preset_name);
  for (auto& [k, v] : overrides) m[k] = v;
  if (seed >= 0) m["seed"] = std::to_string(seed);
  if (trials >= 0) m["trials"] = std::to_string(trials);
  ExperimentConfig cfg = build_config(s, m);
  cfg.threads = threads;
  RunResult r;
  {
    py::gil_scoped_release nogil;
    r = run(cfg);
  }
  py::dict tables;
  for (auto& t : r.tables) tables[py::str(t.name)] = to_csv(t);
  py::dict metrics;
  for (auto& mt : r.metrics) metrics[py::str(mt.key)] = mt.value;
  py::dict out;
  out["tables"] = tables;
  out["metrics"] = metrics;
  out["summary"] = json_summary(r, cfg);
  return out;
}

}  // namespace

PYBIND11_MODULE(_afdm_isac, mod) {
  mod.doc() = "AFDM ISAC numerical lab";

  py::register_local_exception<NumericalError>(mod, "NumericalError", PyExc_ArithmeticError);
  py::register_local_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);

  py::class_<AfdmConfig>(mod, "AfdmConfig")
      .def(py::init<>())
      .def_readwrite("n_sub", &AfdmConfig::n_sub)
      .def_readwrite("n_cpp", &AfdmConfig::n_cpp)
      .def_readwrite("c1", &AfdmConfig::c1)
      .def_readwrite("c2", &AfdmConfig::c2)
      .def_readwrite("delta_f", &AfdmConfig::delta_f)
      .def_readwrite("f_c", &AfdmConfig::f_c)
      .def("validate", &AfdmConfig::validate)
      .def_static("table1", &AfdmConfig::table1);

  mod.def("daft", &daft, py::arg("s"), py::arg("cfg"));
  mod.def("idaft", &idaft, py::arg("x"), py::arg("cfg"));
  mod.def("daft_matrix", &build_daft_matrix, py::arg("cfg"));
  mod.def("zc_sequence", &zc_sequence, py::arg("length"), py::arg("root"));
  mod.def("proposed_pilot", &proposed_pilot, py::arg("cfg"), py::arg("nu_m"), py::arg("r"), py::arg("pilot_power"),
          py::arg("root") = 1);
  mod.def("single_pilot", &single_pilot, py::arg("cfg"), py::arg("pilot_power"));
  mod.def("ambiguity", &ambiguity, py::arg("s"), py::arg("tau"), py::arg("nu"));
  mod.def("max_sidelobe", &max_sidelobe, py::arg("s"), py::arg("tau_m"), py::arg("nu_m"));
  mod.def("scenarios", &scenario_names);
  mod.def("presets", &preset_names);
  mod.def("run", &run_scenario, py::arg("scenario"), py::arg("preset") = "",
          py::arg("overrides") = std::map<std::string, std::string>{}, py::arg("seed") = -1, py::arg("trials") = -1,
          py::arg("threads") = 0);
}
