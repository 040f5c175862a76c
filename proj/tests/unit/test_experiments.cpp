#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "afdm/experiment.hpp"
#include "afdm/parallel.hpp"
#include "afdm/rng.hpp"

using namespace afdm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("afdm_test_" + name);
  fs::remove_all(p);
  return p;
}

// Minimal RFC 4180 reader used to check the writer.
std::vector<std::vector<std::string>> parse_csv(const std::string& s) {
  std::vector<std::vector<std::string>> rows(1);
  std::string f;
  bool q = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (q) {
      if (c == '"' && i + 1 < s.size() && s[i + 1] == '"') {
        f += '"';
        ++i;
      } else if (c == '"') {
        q = false;
      } else {
        f += c;
      }
    } else if (c == '"') {
      q = true;
    } else if (c == ',') {
      rows.back().push_back(f);
      f.clear();
    } else if (c == '\r' && i + 1 < s.size() && s[i + 1] == '\n') {
      rows.back().push_back(f);
      f.clear();
      rows.emplace_back();
      ++i;
    } else {
      f += c;
    }
  }
  if (rows.back().empty()) rows.pop_back();
  return rows;
}

ExperimentConfig small(Scenario s, ConfigMap extra = {}) {
  ConfigMap m = preset("desk");
  m["trials"] = "4";
  m["snr_d_db"] = "10,20";
  m["schemes"] = "single,proposed:4";
  for (auto& [k, v] : extra) m[k] = v;
  return build_config(s, m);
}

}  // namespace

TEST_CASE("config text parsing") {
  auto m = parse_config_text("schema_version = 1\n# comment\n\nn_sub = 64 \ntau_m=3\n");
  CHECK(m.at("n_sub") == "64");
  CHECK(m.at("tau_m") == "3");
  CHECK_THROWS_AS(parse_config_text("n_sub = 64\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("schema_version = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("schema_version = 1\nno equals sign\n"), ConfigError);
}

TEST_CASE("build_config validation") {
  ConfigMap m = default_config();
  CHECK_NOTHROW(build_config(Scenario::mse_sweep, m));
  auto bad = [&](const std::string& kv) {
    ConfigMap b = default_config();
    apply_override(b, kv);
    CHECK_THROWS_AS(build_config(Scenario::mse_sweep, b), ConfigError);
  };
  bad("no_such_key=1");
  bad("n_sub=100");
  bad("schemes=proposed:64");
  bad("tau_m=40");
  bad("paths=99");
  bad("schemes=bogus:3");
  bad("trials=-1");
  bad("constellation=psk8");
  CHECK_THROWS_AS(preset("nope"), ConfigError);
  ConfigMap o;
  CHECK_THROWS_AS(apply_override(o, "missing_equals"), ConfigError);
  auto c = build_config(Scenario::mse_sweep, default_config());
  CHECK(c.afdm.c1 == doctest::Approx(8.0 / 256));
  CHECK(c.echo.count("threads") == 0);
  for (auto& name : preset_names()) CHECK_NOTHROW(preset(name));
}

TEST_CASE("scheme labels") {
  auto s = parse_scheme("proposed:8");
  CHECK(s.kind == PilotKind::proposed);
  CHECK(s.count == 8);
  CHECK(parse_scheme("single").kind == PilotKind::single);
  CHECK(parse_scheme("spi:8").kind == PilotKind::traditional_spi);
  CHECK_THROWS(parse_scheme("proposed:x"));
  CHECK(parse_scenario("roc") == Scenario::roc);
  CHECK_THROWS_AS(parse_scenario("nope"), ConfigError);
}

TEST_CASE("CSV writer") {
  Table t{"t", {"a", "b,c", "q\"x"}, {{"1", "two\r\nlines", ""}, {"x", "y", "z"}}};
  std::string s = to_csv(t);
  CHECK(s.substr(0, s.find("\r\n")) == "a,\"b,c\",\"q\"\"x\"");
  auto rows = parse_csv(s);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == t.header);
  CHECK(rows[1] == t.rows[0]);
  CHECK(rows[2] == t.rows[1]);
  Table h{"h", {"x", "y"}, {}};
  CHECK(to_csv(h) == "x,y\r\n");
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3) == "0.333333333333");
}

TEST_CASE("comm sweep output shape and JSON summary") {
  auto c = small(Scenario::mse_sweep);
  RunResult r = run(c);
  REQUIRE(!r.tables.empty());
  const Table& t = r.tables[0];
  CHECK(t.header.size() == c.schemes.size() + 1);
  CHECK(t.rows.size() == c.snr_d_db.size());
  CHECK(t.header[0] == "snr_d_db");
  auto j = nlohmann::json::parse(json_summary(r, c));
  CHECK(j["schema"] == "afdm-isac-summary");
  CHECK(j["scenario"] == "mse_sweep");
  CHECK(j["trials"] == 4);
  CHECK(j["config"]["n_sub"] == "64");
  CHECK(j["conventions"].is_object());
  CHECK(j["tables"][0]["columns"].size() == t.header.size());
  // the echoed config rebuilds the same run
  ConfigMap back;
  for (auto& [k, v] : j["config"].items()) back[k] = v.get<std::string>();
  back.erase("scenario");
  auto c2 = build_config(Scenario::mse_sweep, back);
  CHECK(to_csv(run(c2).tables[0]) == to_csv(t));
}

TEST_CASE("every scenario runs at toy scale") {
  for (Scenario s : {Scenario::ber_sweep, Scenario::roc, Scenario::crb_rmse, Scenario::af_surface,
                     Scenario::crb_pdf, Scenario::theorem_checks}) {
    ConfigMap extra{{"crb_draws", "50"}, {"sensing_snr_db", "0"}, {"gamma_points", "20"}};
    if (s != Scenario::ber_sweep) extra["schemes"] = "proposed:4";
    if (s == Scenario::roc) extra["tau_m"] = "7";
    auto c = small(s, extra);
    RunResult r = run(c);
    CHECK(r.scenario == s);
    REQUIRE(!r.tables.empty());
    for (auto& t : r.tables)
      for (auto& row : t.rows) CHECK(row.size() == t.header.size());
  }
}

TEST_CASE("results do not depend on the thread count") {
  auto c = small(Scenario::ber_sweep);
  c.threads = 1;
  std::string a = to_csv(run(c).tables[0]);
  c.threads = 3;
  std::string b = to_csv(run(c).tables[0]);
  CHECK(a == b);
  std::vector<int> slot(100, -1);
  parallel_for(100, 4, [&](int i) { slot[i] = i * i; });
  for (int i = 0; i < 100; ++i) CHECK(slot[i] == i * i);
  CHECK_THROWS(parallel_for(10, 2, [](int i) {
    if (i == 7) throw std::runtime_error("x");
  }));
}

TEST_CASE("trial seeds") {
  CHECK(trial_seed(1, name_tag("comm"), 0) == trial_seed(1, name_tag("comm"), 0));
  CHECK(trial_seed(1, name_tag("comm"), 0) != trial_seed(1, name_tag("comm"), 1));
  CHECK(trial_seed(1, name_tag("comm"), 0) != trial_seed(2, name_tag("comm"), 0));
  CHECK(trial_seed(1, name_tag("comm"), 0) != trial_seed(1, name_tag("roc"), 0));
}

#ifdef AFDM_CLI_PATH
TEST_CASE("command line exit codes and files") {
  const std::string cli = AFDM_CLI_PATH;
  fs::path out = scratch("cli");
  auto run_cli = [&](const std::string& args) {
    std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  };
  CHECK(run_cli("mse_sweep --preset desk --trials 3 --override snr_d_db=10,20 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "mse_sweep.csv"));
  CHECK(fs::exists(out / "mse_sweep_summary.json"));
  std::string first = slurp(out / "mse_sweep.csv");
  CHECK(run_cli("mse_sweep --preset desk --trials 3 --override snr_d_db=10,20 --threads 2 --out " + out.string()) == 0);
  CHECK(slurp(out / "mse_sweep.csv") == first);
  CHECK(run_cli("bogus --preset desk") == 2);
  CHECK(run_cli("mse_sweep --preset nope") == 2);
  CHECK(run_cli("mse_sweep --preset desk --override tau_m=99") == 2);
  CHECK(run_cli("mse_sweep --preset desk --override n_sub") == 2);
  CHECK(run_cli("mse_sweep --preset desk --not-an-option") == 2);
  // more grid taps than subcarriers with an improper prior: rank-deficient LS
  CHECK(run_cli("mse_sweep --preset fig4 --trials 2 --out " + out.string() +
                " --override tau_m=3 prior_var=inf schemes=proposed:2") == 3);
  fs::remove_all(out);
}
#endif
