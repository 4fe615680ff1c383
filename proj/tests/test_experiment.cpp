#include "doctest.h"
#include "gqm/errors.hpp"
#include "gqm/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gqm;
using nlohmann::json;

namespace {

json free_u1() {
  return json::parse(R"j({
    "group": "U(1)",
    "grid": {"x_min": -40.0, "x_max": 40.0, "n_sites": 512},
    "initial": {"width": 2.0},
    "t_final": 4.0,
    "pde": {"dt": 0.02},
    "output": {"snapshot_every": 50}
  })j");
}

json su2_both() {
  return json::parse(R"j({
    "group": "SU(2)",
    "grid": {"x_min": -8.0, "x_max": 8.0, "n_sites": 320},
    "field": {"family": "gaussian_bump", "phi": [0.0, 0.0, 2.0], "a": [1.5, 0.0, 0.0], "center": 0.5, "width": 2.0},
    "initial": {"momentum": 1.0, "factor": "random"},
    "route": "both",
    "t_final": 0.2,
    "pde": {"dt": 0.005},
    "path": {"epsilon": 0.04, "window": 16, "eta": 0.0, "convergence_levels": 3},
    "output": {"snapshot_every": 1},
    "seed": 3
  })j");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

const CheckResult* find_check(const RunReport& r, const std::string& name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("defaults are echoed explicitly") {
  const auto cfg = parse_config(json::object());
  const json echo = config_to_json(cfg);
  CHECK(echo["hbar"] == 1.0);
  CHECK(echo["grid"]["boundary"] == "periodic");
  CHECK(echo["path"]["window"] == 8.0);
  CHECK(echo["path"]["eta"] == 1e-3);
  // the echo parses back to the same thing
  CHECK(config_to_json(parse_config(echo)) == echo);
}

TEST_CASE("every violation is listed") {
  json j = json::parse(R"j({"group": "SU(1)", "mass": -1, "grid": {"boundary": "open", "extra": 1},
                          "path": {"eta": 0.5}, "pde": {"dt": "fast"}})j");
  try {
    parse_config(j);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    for (const char* key : {"group", "mass", "grid.boundary", "grid.extra", "path.eta", "pde.dt"}) {
      CHECK_MESSAGE(msg.find(key) != std::string::npos, key);
    }
  }
}

TEST_CASE("under-resolved path settings are rejected with a remedy") {
  json j = free_u1();
  j["route"] = "path";
  j["t_final"] = 0.1;
  try {
    parse_config(j);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("raise grid.n_sites") != std::string::npos);
  }
  j["path"] = {{"resolution", "ignore"}};
  CHECK_NOTHROW(parse_config(j));
  j["t_final"] = 0.105;
  CHECK_THROWS_AS(parse_config(j), ValidationError);
}

TEST_CASE("missing files and bad factors are validation errors") {
  json j = free_u1();
  j["field"] = {{"family", "file"}, {"file", "/nonexistent/field.txt"}};
  j["initial"]["factor"] = {1.0, 2.0, 3.0};
  try {
    parse_config(j);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("field.file") != std::string::npos);
    CHECK(msg.find("initial.factor") != std::string::npos);
  }
}

TEST_CASE("free U(1) run: norm drift and width law") {
  const RunReport r = run_experiment(parse_config(free_u1()));
  REQUIRE_FALSE(r.failed);
  const auto* drift = find_check(r, "pde norm drift");
  const auto* width = find_check(r, "pde free width law");
  REQUIRE(drift);
  REQUIRE(width);
  CHECK(drift->passed);
  CHECK(width->passed);
  CHECK(width->measured < 5e-3);
  REQUIRE(r.series.size() == 1);
  CHECK(r.series[0].snapshots.size() == 5);
}

TEST_CASE("empty time range echoes the initial state") {
  json j = free_u1();
  j["t_final"] = 0.0;
  const auto cfg = parse_config(j);
  const RunReport r = run_experiment(cfg);
  REQUIRE(r.series.size() == 1);
  REQUIRE(r.series[0].snapshots.size() == 1);
  const Wavefunction psi0 = build_initial_state(cfg, build_grid(cfg));
  CHECK((r.series[0].final_state->values() - psi0.values()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("route both: finite decreasing distance series, byte-identical reruns") {
  const auto cfg = parse_config(su2_both());
  const RunReport r = run_experiment(cfg);
  REQUIRE_FALSE(r.failed);
  REQUIRE(r.convergence);
  const auto& levels = r.convergence->levels;
  REQUIRE(levels.size() == 3);
  for (std::size_t k = 0; k < levels.size(); ++k) {
    CHECK(std::isfinite(levels[k].distance));
    if (k > 0) CHECK(levels[k].distance < levels[k - 1].distance);
  }
  const auto* dec = find_check(r, "path vs pde distance decreasing");
  REQUIRE(dec);
  CHECK(dec->passed);

  const auto base = std::filesystem::temp_directory_path() / "gqm_test_experiment";
  std::filesystem::remove_all(base);
  write_run_outputs(r, build_grid(cfg), base / "a");
  write_run_outputs(run_experiment(cfg), build_grid(cfg), base / "b");
  for (const char* f : {"config.json", "series_pde.csv", "series_path.csv", "density_path.csv", "convergence.csv",
                        "final_state_pde.json", "final_state_path.json"}) {
    CHECK_MESSAGE(slurp(base / "a" / f) == slurp(base / "b" / f), f);
  }
  CHECK(std::filesystem::exists(base / "a" / "report.json"));
  std::filesystem::remove_all(base);
}

TEST_CASE("numeric failure gives a marked partial report") {
  json j = free_u1();
  j["field"] = {{"family", "constant"}, {"a", {1e200}}};
  j["group"] = "U(1)";
  const RunReport r = run_experiment(parse_config(j));
  CHECK(r.failed);
  CHECK_FALSE(r.failure.empty());
  CHECK(report_to_json(r)["failed"] == true);
}
