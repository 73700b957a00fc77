#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "run_config.hpp"

namespace hypcover::cli {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Files are produced in memory so the manifest can hash exactly what was
/// written.
struct RunResult {
  std::vector<std::pair<std::string, std::string>> artifacts;  ///< file name, contents
  std::vector<Check> checks;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
};

RunResult run_experiment(const RunConfig& cfg);

}  // namespace hypcover::cli
