#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hopf/error.hpp"
#include "hopf/scenario.hpp"

using namespace hopf;

namespace {

Json base_config() {
  return Json::parse(R"({
    "scenario": "unit",
    "seed": 3,
    "space": {"name": "integer_translation", "params": {"weights": "uniform", "truncation": 64}},
    "windows": {"max": 10},
    "tasks": [
      {"id": "hopf", "type": "transform", "f": {"family": "exp_decay", "base": 2}, "point": [0]},
      {"id": "cls", "type": "classify", "f": {"family": "exp_decay", "base": 2}, "samples": 3}
    ]
  })");
}

std::string config_error(const Json& cfg) {
  try {
    validate_config(cfg);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("hopf-unit-" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Scenario, GroupGrammar) {
  EXPECT_EQ(parse_group_spec("Z").name(), "Z");
  EXPECT_EQ(parse_group_spec("R^2").name(), "R^2");
  EXPECT_EQ(parse_group_spec("ZxZ/2").name(), "ZxZ/2");
  EXPECT_EQ(parse_group_spec("E2").name(), "E2");
  EXPECT_EQ(parse_group_spec("Aff").name(), "Aff");
  EXPECT_THROW(parse_group_spec("Q"), ConfigError);
  EXPECT_THROW(parse_group_spec("Z/1"), ConfigError);
  EXPECT_THROW(parse_group_spec(""), ConfigError);
}

TEST(Scenario, MalformedConfigsNameTheField) {
  struct Case {
    std::string what;
    std::function<void(Json&)> mutate;
    std::string field;
  };
  const std::vector<Case> cases = {
      {"unknown top-level key", [](Json& c) { c["colour"] = 1; }, "colour"},
      {"missing scenario", [](Json& c) { c.erase("scenario"); }, "scenario"},
      {"scenario not a string", [](Json& c) { c["scenario"] = 5; }, "scenario"},
      {"negative seed", [](Json& c) { c["seed"] = -1; }, "seed"},
      {"no space or discrete", [](Json& c) { c.erase("space"); }, "space"},
      {"unknown space", [](Json& c) { c["space"]["name"] = "torus"; }, "space.name"},
      {"unknown space param", [](Json& c) { c["space"]["params"]["alpha"] = 1; }, "space.params.alpha"},
      {"bad weights", [](Json& c) { c["space"]["params"]["weights"] = "heavy"; }, "space.params.weights"},
      {"bad group", [](Json& c) { c["group"] = "SL2"; }, "group"},
      {"windows too small", [](Json& c) { c["windows"]["max"] = 1; }, "windows.max"},
      {"bad quadrature method", [](Json& c) { c["quadrature"] = {{"method", "simpson"}}; }, "quadrature.method"},
      {"bad quadrature order", [](Json& c) { c["quadrature"] = {{"order", 0}}; }, "quadrature.order"},
      {"bad policy", [](Json& c) { c["policy"] = {{"quorum", 2.0}}; }, "policy"},
      {"tasks not a list", [](Json& c) { c["tasks"] = 3; }, "tasks"},
      {"task id not a string", [](Json& c) { c["tasks"][0]["id"] = 5; }, "tasks[0].id"},
      {"duplicate task id", [](Json& c) { c["tasks"][1]["id"] = "hopf"; }, "tasks[1].id"},
      {"bad task id", [](Json& c) { c["tasks"][0]["id"] = "a b"; }, "tasks[0].id"},
      {"unknown task type", [](Json& c) { c["tasks"][0]["type"] = "integrate"; }, "tasks[0].type"},
      {"unknown task key", [](Json& c) { c["tasks"][1]["colour"] = 1; }, "tasks[1].colour"},
      {"bad test family", [](Json& c) { c["tasks"][0]["f"]["family"] = "cauchy"; }, "tasks[0].f.family"},
      {"nonpositive sigma", [](Json& c) { c["tasks"][0]["f"] = {{"family", "gaussian"}, {"sigma", -1}}; }, "tasks[0].f.sigma"},
      {"point of wrong dimension", [](Json& c) { c["tasks"][0]["point"] = {0, 1}; }, "tasks[0].point"},
      {"discrete task on a space", [](Json& c) { c["tasks"][0] = {{"id", "d"}, {"type", "greedy-tmax"}}; }, "tasks[0]"},
      {"sampling without seed", [](Json& c) { c.erase("seed"); }, "seed"},
  };
  for (const auto& k : cases) {
    Json cfg = base_config();
    k.mutate(cfg);
    const std::string msg = config_error(cfg);
    EXPECT_NE(msg.find(k.field), std::string::npos) << k.what << ": got '" << msg << "'";
  }
}

TEST(Scenario, EmptyTaskListSucceeds) {
  Json cfg = base_config();
  cfg["tasks"] = Json::array();
  const auto r = run_scenario(cfg, RunOptions{}, false);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.report["summary"]["tasks"], 0);
}

TEST(Scenario, IntegerTranslationSeriesConvergesToThree) {
  const auto dir = temp_dir("ztrans");
  RunOptions opt;
  opt.out_dir = dir.string();
  const auto r = run_scenario(base_config(), opt);
  EXPECT_EQ(r.exit_code, 0);
  const auto& rows = r.report["tasks"][0]["series"][0]["rows"];
  ASSERT_EQ(rows.size(), 11u);
  EXPECT_NEAR(rows.back()[1].get<double>(), 3.0, 1e-12);
  EXPECT_EQ(r.report["tasks"][1]["verdict"], "Dissipative");
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "hopf.series.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "timing.json"));
  EXPECT_EQ(Json::parse(slurp(dir / "report.json")), r.report);

  const std::string csv = emit_series(r.report, "hopf");
  EXPECT_EQ(csv.rfind("# scenario=unit task=hopf", 0), 0u) << csv;
  EXPECT_NE(csv.find("series,n,value"), std::string::npos);
  EXPECT_THROW(emit_series(r.report, "missing"), NoSuchTask);
  std::filesystem::remove_all(dir);
}

TEST(Scenario, ReportsAreByteIdenticalAcrossReruns) {
  const auto a = temp_dir("det-a"), b = temp_dir("det-b");
  RunOptions oa, ob;
  oa.out_dir = a.string();
  ob.out_dir = b.string();
  run_scenario(base_config(), oa);
  run_scenario(base_config(), ob);
  EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
  RunOptions oc = oa;
  oc.seed_override = 4;
  const auto c = run_scenario(base_config(), oc, false);
  EXPECT_EQ(c.report["provenance"]["seed"], 4);
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST(Scenario, StrictModeFailsOnUndecided) {
  Json cfg = base_config();
  cfg["windows"]["max"] = 3;  // fewer windows than the policy needs
  cfg["tasks"] = Json::array({Json::parse(R"({"id": "t", "type": "classify", "f": {"family": "exp_decay"}, "point": [0]})")});
  EXPECT_EQ(run_scenario(cfg, RunOptions{}, false).exit_code, 0);
  RunOptions strict;
  strict.strict = true;
  EXPECT_EQ(run_scenario(cfg, strict, false).exit_code, 2);
}

TEST(Scenario, NonPositiveTransformIsAConfigError) {
  Json cfg = base_config();
  cfg["space"] = Json::parse(R"({"name": "circle_rotation"})");
  cfg["tasks"] = Json::array({Json::parse(
      R"({"id": "bad", "type": "transform", "f": {"family": "indicator", "set": {"type": "interval", "lo": 0, "hi": 0.5}}, "point": [0.1]})")});
  EXPECT_THROW(run_scenario(cfg, RunOptions{}, false), ConfigError);
}

TEST(Scenario, DiscreteTasks) {
  const Json cfg = Json::parse(R"({
    "scenario": "discrete",
    "discrete": {"builder": "union", "parts": [{"builder": "translation", "T": 12, "C": 4},
                                               {"builder": "rotation", "n": 6}]},
    "tasks": [{"id": "p", "type": "discrete-exact", "transversal": true},
              {"id": "g", "type": "greedy-tmax"},
              {"id": "h", "type": "hajian-ito", "sets": [["p0.0"]]}]
  })");
  const auto r = run_scenario(cfg, RunOptions{}, false);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.report["tasks"][0]["conservative"].size(), 6u);
  EXPECT_EQ(r.report["tasks"][0]["dissipative"].size(), 9u);
  EXPECT_EQ(r.report["tasks"][0]["transversal"]["law_violations"], 0);
}

TEST(Scenario, DiscreteSystemFromText) {
  const std::string text = serialize(rotation_system(3));
  Json cfg = Json::parse(R"({"scenario": "text", "tasks": [{"id": "p", "type": "discrete-exact"}]})");
  cfg["discrete"] = {{"text", text}};
  const auto r = run_scenario(cfg, RunOptions{}, false);
  EXPECT_EQ(r.report["tasks"][0]["conservative"].size(), 3u);
  cfg["discrete"] = {{"text", "garbage"}};
  EXPECT_THROW(validate_config(cfg), ConfigError);
}

TEST(Scenario, ShippedScenariosValidate) {
  for (const auto& e : std::filesystem::directory_iterator(std::filesystem::path(HOPF_SOURCE_DIR) / "scenarios")) {
    if (e.path().extension() != ".json") continue;
    EXPECT_NO_THROW(validate_config(Json::parse(slurp(e.path())))) << e.path();
  }
}

TEST(Scenario, CatalogListsEveryKind) {
  std::string all;
  for (const auto& l : catalog_lines()) all += l + "\n";
  for (const char* name : {"circle_rotation", "maharam", "krengel_space", "E2/SO2", "hajian-ito", "translation"})
    EXPECT_NE(all.find(name), std::string::npos) << name;
}

TEST(Scenario, ModuleErrorsBecomeTaskErrors) {
  // A certification radius larger than the truncation fails inside the task.
  auto ds = translation_system(10, 3);
  ds.exact_radius = 9;
  Json cfg = Json::parse(R"({"scenario": "uncertified", "tasks": [{"id": "p", "type": "discrete-exact"}]})");
  cfg["discrete"] = {{"text", serialize(ds)}};
  const auto r = run_scenario(cfg, RunOptions{}, false);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.report["tasks"][0]["status"], "error");
  EXPECT_NE(r.report["tasks"][0]["error"].dump().find("UncertifiedOrbit"), std::string::npos) << r.report.dump();
  EXPECT_EQ(r.report["summary"]["errors"], 1);
}
