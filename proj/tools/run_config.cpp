#include "run_config.hpp"

#include <fstream>
#include <set>

#include "hypcover/error.hpp"
#include "hypcover/hyperbolic.hpp"

namespace hypcover::cli {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorKind::InvalidConfig, what); }

template <class T>
T get(const nlohmann::json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    bad("config key '" + key + "' has the wrong type");
  }
}

const std::set<std::string> kExperiments{"sample", "certify", "walk", "kernels", "fixpoints"};

}  // namespace

void RunConfig::validate() const {
  if (!kExperiments.count(experiment))
    bad("experiment must be one of sample, certify, walk, kernels, fixpoints (got '" + experiment + "')");
  if (n < 1 || n > 1000000) bad("n must lie in [1, 1000000]");
  if ((theta_a != 1 && theta_a != -1) || (theta_b != 1 && theta_b != -1)) bad("theta entries must be +1 or -1");
  if (!(rho_coef > 0.0) || rho_coef > 4.0) bad("rho_coef must lie in (0, 4]");
  if (backend != "graph" && backend != "fem") bad("backend must be graph or fem");
  if (!(mesh_h > 0.0) || mesh_h > 0.2) bad("mesh_h must lie in (0, 0.2]");
  if (!(trunc_Y >= 4.0) || trunc_Y > 64.0) bad("trunc_Y must lie in [4, 64]");
  if (!(tol > 0.0) || tol > 1e-3) bad("tol must lie in (0, 1e-3]");
  if (out.empty()) bad("out must be a directory name");
  if (threads < 1 || threads > 256) bad("threads must lie in [1, 256]");
  if (words.empty()) bad("words must name at least one subgroup generator");
  for (const auto& w : words) {
    try {
      if (Word::parse(w).reduced().empty()) bad("subgroup generator '" + w + "' is trivial");
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InvalidConfig) throw;
      bad("subgroup generator '" + w + "' is not a word in a, b, A, B");
    }
  }
  if (n_grid.empty()) bad("n_grid must not be empty");
  for (int m : n_grid) {
    if (m < 1 || m > 100000) bad("n_grid entries must lie in [1, 100000]");
  }
  if (samples < 1 || samples > 1000000000ULL) bad("samples must lie in [1, 1e9]");
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["experiment"] = experiment;
  j["n"] = n;
  j["seed"] = seed;
  j["theta"] = {theta_a, theta_b};
  j["rho_coef"] = rho_coef;
  j["backend"] = backend;
  j["mesh_h"] = mesh_h;
  j["trunc_Y"] = trunc_Y;
  j["tol"] = tol;
  j["out"] = out;
  j["words"] = words;
  j["n_grid"] = n_grid;
  j["samples"] = samples;
  return j;
}

void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) bad("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "experiment") cfg.experiment = get<std::string>(v, key);
    else if (key == "n") cfg.n = get<int>(v, key);
    else if (key == "seed") cfg.seed = get<std::uint64_t>(v, key);
    else if (key == "theta") {
      const auto t = get<std::vector<int>>(v, key);
      if (t.size() != 2) bad("theta must be a pair");
      cfg.theta_a = t[0];
      cfg.theta_b = t[1];
    } else if (key == "rho_coef") cfg.rho_coef = get<double>(v, key);
    else if (key == "backend") cfg.backend = get<std::string>(v, key);
    else if (key == "mesh_h") cfg.mesh_h = get<double>(v, key);
    else if (key == "trunc_Y") cfg.trunc_Y = get<double>(v, key);
    else if (key == "tol") cfg.tol = get<double>(v, key);
    else if (key == "out") cfg.out = get<std::string>(v, key);
    else if (key == "threads") cfg.threads = get<int>(v, key);
    else if (key == "words") cfg.words = get<std::vector<std::string>>(v, key);
    else if (key == "n_grid") cfg.n_grid = get<std::vector<int>>(v, key);
    else if (key == "samples") cfg.samples = get<std::uint64_t>(v, key);
    else bad("unknown config key '" + key + "'");
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::Io, "cannot open config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    bad(std::string("config file is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  apply_json(cfg, j);
  return cfg;
}

void parse_theta(RunConfig& cfg, const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) bad("theta must look like -1,-1");
  try {
    std::size_t used = 0;
    const std::string a = text.substr(0, comma);
    const std::string b = text.substr(comma + 1);
    cfg.theta_a = std::stoi(a, &used);
    if (used != a.size()) bad("theta must look like -1,-1");
    cfg.theta_b = std::stoi(b, &used);
    if (used != b.size()) bad("theta must look like -1,-1");
  } catch (const std::logic_error&) {
    bad("theta must look like -1,-1");
  }
}

}  // namespace hypcover::cli
