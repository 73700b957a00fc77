// hypcover: batch driver for the cover experiments.
//
//   hypcover walk --n 2000 --seed 3 --theta=-1,-1 --backend graph --out runs/w
//   hypcover --config run.json --seed 4
//
// Every run writes its artifacts and a manifest.json into --out.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "experiments.hpp"
#include "hypcover/digest.hpp"
#include "hypcover/error.hpp"
#include "run_config.hpp"

namespace {

using hypcover::Error;
using hypcover::ErrorKind;
using hypcover::cli::RunConfig;

constexpr int kSchemaVersion = 1;
constexpr int kExitChecksFailed = 1;
constexpr int kExitInvalidConfig = 2;
constexpr int kExitUnexpected = 3;

// Distinct codes per error class: 10 + position in ErrorKind, except
// configuration problems, which share the usage code.
int exit_code(ErrorKind k) {
  if (k == ErrorKind::InvalidConfig) return kExitInvalidConfig;
  return 10 + static_cast<int>(k);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream os(p, std::ios::binary);
  os << body;
  if (!os) hypcover::fail(ErrorKind::Io, "cannot write " + p.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral experiments on random covers of the thrice-punctured sphere"};
  app.set_version_flag("--version", "hypcover manifest schema " + std::to_string(kSchemaVersion));
  std::string config_path, experiment_pos, experiment_opt, theta, words, n_grid;
  RunConfig flags;
  app.add_option("name", experiment_pos, "experiment: sample | certify | walk | kernels | fixpoints");
  app.add_option("--experiment", experiment_opt, "same as the positional argument");
  app.add_option("--config", config_path, "JSON config file; flags given here override it");
  auto* o_n = app.add_option("--n", flags.n, "cover degree");
  auto* o_seed = app.add_option("--seed", flags.seed, "master seed");
  auto* o_theta = app.add_option("--theta", theta, "base character as a,b with entries +-1 (write --theta=-1,-1)");
  auto* o_backend = app.add_option("--backend", flags.backend, "walk backend: graph | fem");
  auto* o_rho = app.add_option("--rho-coef", flags.rho_coef, "c_g in rho = floor(c_g log2 n)");
  auto* o_h = app.add_option("--mesh-h", flags.mesh_h, "FEM mesh size");
  auto* o_Y = app.add_option("--trunc-Y", flags.trunc_Y, "FEM cusp truncation height");
  auto* o_tol = app.add_option("--tol", flags.tol, "eigensolver tolerance");
  auto* o_out = app.add_option("--out", flags.out, "output directory");
  auto* o_threads = app.add_option("--threads", flags.threads, "worker threads (results do not depend on it)");
  auto* o_words = app.add_option("--words", words, "subgroup generators for fixpoints, comma separated");
  auto* o_grid = app.add_option("--n-grid", n_grid, "degrees for the fixpoints ratio table, comma separated");
  auto* o_samples = app.add_option("--samples", flags.samples, "Monte Carlo samples");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalidConfig;
  }

  RunConfig cfg;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  auto manifest_base = [&] {
    nlohmann::ordered_json m;
    m["schema_version"] = kSchemaVersion;
    m["tool"] = "hypcover";
    m["experiment"] = cfg.experiment;
    m["config"] = cfg.to_json();
    return m;
  };
  bool out_ready = false;
  try {
    if (!config_path.empty()) cfg = hypcover::cli::load_config_file(config_path);
    if (!experiment_pos.empty() && !experiment_opt.empty() && experiment_pos != experiment_opt)
      hypcover::fail(ErrorKind::InvalidConfig, "positional experiment and --experiment disagree");
    if (!experiment_pos.empty()) cfg.experiment = experiment_pos;
    if (!experiment_opt.empty()) cfg.experiment = experiment_opt;
    if (*o_n) cfg.n = flags.n;
    if (*o_seed) cfg.seed = flags.seed;
    if (*o_theta) hypcover::cli::parse_theta(cfg, theta);
    if (*o_backend) cfg.backend = flags.backend;
    if (*o_rho) cfg.rho_coef = flags.rho_coef;
    if (*o_h) cfg.mesh_h = flags.mesh_h;
    if (*o_Y) cfg.trunc_Y = flags.trunc_Y;
    if (*o_tol) cfg.tol = flags.tol;
    if (*o_out) cfg.out = flags.out;
    if (*o_threads) cfg.threads = flags.threads;
    if (*o_words) cfg.words = split_list(words);
    if (*o_grid) {
      cfg.n_grid.clear();
      for (const auto& s : split_list(n_grid)) {
        try {
          cfg.n_grid.push_back(std::stoi(s));
        } catch (const std::logic_error&) {
          hypcover::fail(ErrorKind::InvalidConfig, "n-grid entries must be integers");
        }
      }
    }
    if (*o_samples) cfg.samples = flags.samples;
    cfg.validate();

    std::filesystem::create_directories(cfg.out);
    out_ready = true;
    const auto result = hypcover::cli::run_experiment(cfg);

    auto m = manifest_base();
    m["artifacts"] = nlohmann::ordered_json::array();
    for (const auto& [name, body] : result.artifacts) {
      write_file(std::filesystem::path(cfg.out) / name, body);
      m["artifacts"].push_back({{"file", name}, {"sha256", hypcover::sha256_hex(body)}, {"bytes", body.size()}});
    }
    m["checks"] = nlohmann::ordered_json::array();
    m["failures"] = nlohmann::ordered_json::array();
    for (const auto& c : result.checks) {
      m["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
      if (!c.pass) m["failures"].push_back(c.name);
    }
    m["summary"] = result.summary;
    const bool ok = m["failures"].empty();
    m["status"] = ok ? "ok" : "checks_failed";
    m["wall_time_s"] = elapsed();
    write_file(std::filesystem::path(cfg.out) / "manifest.json", m.dump(2) + "\n");
    for (const auto& c : result.checks) std::cout << (c.pass ? "pass  " : "FAIL  ") << c.name << "  (" << c.detail << ")\n";
    std::cout << "wrote " << result.artifacts.size() << " artifacts and manifest.json to " << cfg.out << "\n";
    return ok ? 0 : kExitChecksFailed;
  } catch (const Error& e) {
    std::cerr << "hypcover: " << hypcover::to_string(e.kind()) << ": " << e.what() << "\n";
    if (out_ready) {
      auto m = manifest_base();
      m["status"] = "error";
      m["error"] = {{"kind", hypcover::to_string(e.kind())}, {"message", e.what()}};
      m["wall_time_s"] = elapsed();
      try {
        write_file(std::filesystem::path(cfg.out) / "manifest.json", m.dump(2) + "\n");
      } catch (const Error&) {
      }
    }
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "hypcover: unexpected failure: " << e.what() << "\n";
    return kExitUnexpected;
  }
}
