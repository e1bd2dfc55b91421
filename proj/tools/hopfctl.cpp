#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hopf/error.hpp"
#include "hopf/scenario.hpp"

namespace {

hopf::Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hopf::ConfigError("cannot open '" + path + "'");
  try {
    return hopf::Json::parse(in);
  } catch (const hopf::Json::parse_error& e) {
    throw hopf::ConfigError(path + ": invalid JSON: " + e.what());
  }
}

int cmd_run(const std::string& config, bool strict, const std::optional<std::string>& out,
            const std::optional<std::uint64_t>& seed) {
  hopf::RunOptions opt;
  opt.strict = strict;
  opt.out_dir = out;
  opt.seed_override = seed;
  opt.base_dir = std::filesystem::absolute(config).parent_path().string();
  const hopf::RunOutcome r = hopf::run_scenario(read_json(config), opt);
  const auto& s = r.report["summary"];
  std::cout << "scenario " << r.report["scenario"].get<std::string>() << ": " << s["tasks"] << " task(s), "
            << s["undecided"] << " undecided, " << s["errors"] << " error(s)\n";
  for (const auto& t : r.report["tasks"]) {
    std::cout << "  " << t["id"].get<std::string>() << " [" << t["type"].get<std::string>() << "] ";
    if (t["status"] == "error")
      std::cout << "error: " << t["error"].get<std::string>() << '\n';
    else
      std::cout << t.value("verdict", "done") << '\n';
  }
  for (const auto& f : r.files) std::cout << "wrote " << f << '\n';
  return r.exit_code;
}

int cmd_emit(const std::string& report, const std::string& task) {
  std::cout << hopf::emit_series(read_json(report), task);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hopfctl: Hopf decomposition scenarios for group actions"};
  app.require_subcommand(1);

  std::string config, report, task;
  bool strict = false;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "run a scenario config and write report and series files");
  run->add_option("config", config, "scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_flag("--strict", strict, "exit 2 if any verdict is Undecided");
  run->add_option("--out", out, "output directory (default: config output.dir, then $HOPF_OUT_DIR, then ./out)");
  run->add_option("--seed-override", seed, "replace the config seed");

  auto* emit = app.add_subcommand("emit", "print one task's series as CSV");
  emit->add_option("report", report, "report.json written by run")->required()->check(CLI::ExistingFile);
  emit->add_option("task-id", task, "task id")->required();

  auto* catalog = app.add_subcommand("catalog", "list groups, spaces, pairs and task types");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, strict, out, seed);
    if (*emit) return cmd_emit(report, task);
    if (*catalog) {
      for (const auto& line : hopf::catalog_lines()) std::cout << line << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "hopfctl: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
