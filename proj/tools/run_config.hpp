#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace hypcover::cli {

/// One experiment run. Every field has a default; a JSON config file and then
/// command-line flags override them.
struct RunConfig {
  std::string experiment;  ///< sample | certify | walk | kernels | fixpoints
  int n = 10;
  std::uint64_t seed = 0;
  int theta_a = -1;
  int theta_b = -1;
  double rho_coef = 0.25;  ///< c_g in rho = floor(c_g log2 n)
  std::string backend = "graph";
  double mesh_h = 0.1;
  double trunc_Y = 8.0;
  double tol = 1e-9;
  std::string out = "hypcover-out";
  int threads = 1;
  std::vector<std::string> words{"ab", "ba"};
  std::vector<int> n_grid{64, 128};
  std::uint64_t samples = 100000;

  /// Throws InvalidConfig naming the offending field.
  void validate() const;
  /// Everything except `threads`, which never changes results.
  nlohmann::ordered_json to_json() const;
};

/// Applies the keys of `j` to `cfg`; unknown keys and ill-typed values are
/// InvalidConfig errors. Keys are the field names above, with theta as [a, b].
void apply_json(RunConfig& cfg, const nlohmann::json& j);

RunConfig load_config_file(const std::string& path);

/// "-1,-1" style pair.
void parse_theta(RunConfig& cfg, const std::string& text);

}  // namespace hypcover::cli
