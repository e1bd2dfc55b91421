#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hopf/discrete.hpp"
#include "hopf/group.hpp"
#include "hopf/gspace.hpp"
#include "hopf/hopf_engine.hpp"

namespace hopf {

using Json = nlohmann::ordered_json;

// Group grammar: factors joined by 'x', each one of Z, Z^d, R, R^d, Z/n, Aff, E2.
GroupModel parse_group_spec(const std::string& spec);  // ConfigError

// Builders from config fragments; `where` prefixes error messages.
SpaceModel build_space(const Json& spec, const std::optional<GroupModel>& group, const std::string& where);
SetDescriptor build_set(const Json& spec, const std::string& where);
TestFunction build_test_function(const Json& spec, const std::string& where);
QuadratureSpec build_quadrature(const Json& spec, const std::string& where);
DecisionPolicy build_policy(const Json& spec, const std::string& where);
DiscreteSystem build_discrete(const Json& spec, const std::string& where, const std::string& base_dir);

struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed_override;
  bool strict = false;
  std::string base_dir = ".";  // relative paths in the config resolve here
};

struct RunOutcome {
  Json report;
  Json timing;
  int exit_code = 0;
  std::string out_dir;
  std::vector<std::string> files;  // written, in order
};

// Validates the whole config up front (ConfigError), then runs tasks in order.
// Module errors inside a task are recorded as TaskError entries and give exit 1.
RunOutcome run_scenario(const Json& config, const RunOptions& options, bool write_files = true);
void validate_config(const Json& config);

// Delimited series rows for one task of a report; NoSuchTask if absent,
// TaskError if the task produced no series.
std::string emit_series(const Json& report, const std::string& task_id);

std::vector<std::string> catalog_lines();

}  // namespace hopf
