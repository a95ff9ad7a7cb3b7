#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nsmooth/cli/config.hpp"
#include "nsmooth/cli/json_out.hpp"
#include "nsmooth/cli/runner.hpp"

using namespace nsmooth::cli;
namespace fs = std::filesystem;

namespace {

Json base_config() {
  return Json::parse(R"({
    "schema_version": 1,
    "manifold": {"kind": "sphere", "dim": 2, "radius": 1.0},
    "field": {"name": "height"},
    "grid": {"kind": "fibonacci", "n": 100},
    "epsilon_ladder": [0.2, 0.1],
    "seed": 3
  })");
}

std::string error_path(const Json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<none>";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nsmooth_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("floats are printed with 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  Json j;
  j["x"] = 0.1;
  j["v"] = {1, 2};
  j["nan"] = std::numeric_limits<double>::quiet_NaN();
  CHECK(dump(j) == "{\n  \"x\": 0.10000000000000001,\n  \"v\": [1, 2],\n  \"nan\": null\n}\n");
}

TEST_CASE("config errors carry field paths") {
  Json c = base_config();
  c["epsilon_ladder"] = {-0.1};
  CHECK(error_path(c) == "epsilon_ladder[0]");
  c = base_config();
  c["epsilon_ladder"] = {0.1, "x"};
  CHECK(error_path(c) == "epsilon_ladder[1]");
  c = base_config();
  c.erase("schema_version");
  CHECK(error_path(c) == "schema_version");
  c = base_config();
  c["schema_version"] = 2;
  CHECK(error_path(c) == "schema_version");
  c = base_config();
  c["manifold"]["radius"] = 0.0;
  CHECK(error_path(c) == "manifold.radius");
  c = base_config();
  c["manifold"]["kind"] = "torus";
  CHECK(error_path(c) == "manifold.dim");
  c = base_config();
  c["field"] = Json::parse(R"({"op": "max", "fields": [{"name": "height"}, {"name": "nope"}]})");
  CHECK(error_path(c) == "field.fields[1].name");
  c = base_config();
  c["bogus"] = 1;
  CHECK(error_path(c) == "bogus");
  c = base_config();
  c["reeb"] = Json::parse(R"({"c": 0.0, "band": [0.5, -0.5]})");
  CHECK(error_path(c) == "reeb.band");
  c = base_config();
  c["field"] = Json::parse(R"({"name": "dist-to-point", "point": [0.0, 1.0]})");
  CHECK(error_path(c) == "field.point");
  CHECK_NOTHROW(parse_config(base_config()));
}

TEST_CASE("seed override") {
  const RunConfig a = parse_config(base_config());
  CHECK(a.seed == 3);
  const RunConfig b = parse_config(base_config(), 17);
  CHECK(b.seed == 17);
  CHECK(b.clarke.seed == 17);
}

TEST_CASE("reports are byte-identical across runs") {
  Json c = base_config();
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  std::ofstream(dir / "config.json") << c.dump();
  std::ostringstream log;
  for (const char* sub : {"smooth", "selftest"}) {
    RunOptions o;
    o.subcommand = sub;
    o.config_path = (dir / "config.json").string();
    o.out_dir = (dir / "a").string();
    CHECK(run(o, log) == kOk);
    o.out_dir = (dir / "b").string();
    CHECK(run(o, log) == kOk);
    CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
    CHECK(slurp(dir / "a" / "grid.csv") == slurp(dir / "b" / "grid.csv"));
    const Json r = Json::parse(slurp(dir / "a" / "report.json"));
    CHECK(r["schema_version"] == 1);
    CHECK(r["subcommand"] == sub);
    CHECK(r["seed"] == 3);
  }
  const std::string csv = slurp(dir / "a" / "grid.csv");
  CHECK(csv.rfind("index,x0,x1,x2,F,F_smooth,grad_norm,margin,verdict\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 101);
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("exit");
  fs::create_directories(dir);
  std::ostringstream log;
  RunOptions o;
  o.out_dir = (dir / "out").string();

  Json bad = base_config();
  bad["epsilon_ladder"] = {-1.0};
  std::ofstream(dir / "bad.json") << bad.dump();
  o.subcommand = "smooth";
  o.config_path = (dir / "bad.json").string();
  CHECK(run(o, log) == kConfigError);
  CHECK(log.str().find("epsilon_ladder[0]") != std::string::npos);

  Json big = base_config();
  big["epsilon_ladder"] = {3.0};
  std::ofstream(dir / "big.json") << big.dump();
  o.config_path = (dir / "big.json").string();
  CHECK(run(o, log) == kConfigError);

  o.config_path = (dir / "missing.json").string();
  CHECK(run(o, log) == kConfigError);

  std::ofstream(dir / "garbage.json") << "{ not json";
  o.config_path = (dir / "garbage.json").string();
  CHECK(run(o, log) == kConfigError);

  Json bump = Json::parse(R"({
    "schema_version": 1,
    "manifold": {"kind": "sphere", "dim": 2},
    "field": {"name": "double-bump"},
    "grid": {"kind": "latlong", "rings": 35, "sectors": 72},
    "reeb": {"c": 0.0, "band": [-0.5, 0.5]}
  })");
  std::ofstream(dir / "bump.json") << bump.dump();
  o.subcommand = "reeb";
  o.config_path = (dir / "bump.json").string();
  CHECK(run(o, log) == kHypothesisFailure);
  const Json r = Json::parse(slurp(fs::path(o.out_dir) / "report.json"));
  CHECK(r["result"]["failed_step"] == 1);
  CHECK(r["status"] == "hypothesis-failure");

  o.subcommand = "probe";
  o.config_path = (dir / "bump.json").string();
  CHECK(run(o, log) == kConfigError);
  o.subcommand = "frobnicate";
  CHECK(run(o, log) == kConfigError);
}

TEST_CASE("scan subcommand") {
  const RunConfig cfg = parse_config(Json::parse(R"({
    "schema_version": 1,
    "manifold": {"kind": "sphere", "dim": 2},
    "field": {"name": "dist-to-point", "point": [0, 0, 1]},
    "grid": {"kind": "latlong", "rings": 11, "sectors": 18}
  })"));
  const RunResult r = execute("scan", cfg);
  CHECK(r.exit_code == kOk);
  CHECK(r.report["result"]["disagreements"].empty());
  CHECK(r.report["result"]["recovered"] == true);
}

TEST_CASE("probe subcommand") {
  const RunConfig cfg = parse_config(Json::parse(R"({
    "schema_version": 1,
    "manifold": {"kind": "euclidean", "dim": 1},
    "field": {"name": "abs-max"},
    "smoothing": {"box": 5},
    "probe": {"points": [[1.0], [4.0]]}
  })"));
  const RunResult r = execute("probe", cfg);
  CHECK(r.exit_code == kOk);
  CHECK(r.report["result"]["points"][0]["clarke"]["singular"] == true);
  CHECK(r.report["result"]["points"][1]["clarke"]["singular"] == false);
}
