#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crj/hyper_estimation.hpp"
#include "crj_tools/io.hpp"

namespace crj::tools {

// Flags shared by every command. Unset values fall back to the config file
// and then to the built-in defaults.
struct Common_options {
  std::optional<std::uint64_t> seed;
  int workers = 0;  // 0 means hardware concurrency
  std::optional<fs::path> config;
};

struct Simulate_options {
  Common_options common;
  fs::path out;
};

struct Hyperparams_options {
  Common_options common;
  std::vector<std::string> inputs;
  fs::path out;
  // Group label applied to every trace; by default traces are grouped by the
  // mu/snr label in their ids.
  std::optional<std::string> tag;
  Pool_weighting weighting = Pool_weighting::homogeneous;
};

struct Analyze_options {
  Common_options common;
  std::vector<std::string> inputs;
  fs::path hyper;
  fs::path out;
  std::optional<int> max_iter;
  std::optional<double> psrf_threshold;
  std::optional<std::string> tag;
  bool write_samples = false;
};

struct Metrics_options {
  fs::path estimates;
  fs::path truth;
  fs::path out;
};

// Simulation grid. Each (fluorophores, mu_f, snr, replicate) cell yields one
// trace with id f<n>_mu<mu_f>_snr<snr>_r<replicate>.
struct Sim_grid {
  std::uint64_t seed = 0;
  int replicates = 10;
  std::vector<int> fluorophores{1, 2, 3, 4};
  std::vector<double> mu_f{500.0, 1000.0, 2000.0};
  std::vector<double> snr{0.01, 0.1, 1.0};
  Sim_config base;
};

auto sim_grid_from_json(const json& j) -> Sim_grid;
auto to_json(const Sim_grid& g) -> json;

auto simulation_id(int n_fluorophores, double mu_f, double snr, int replicate) -> std::string;

// Per-trace seed: depends only on the base seed and the trace id.
auto trace_seed(std::uint64_t base, const std::string& id) -> std::uint64_t;

auto resolve_workers(int requested) -> int;

// Each command writes its outputs and a manifest, and throws crj::Error (or
// Parse_error) on failure.
void cmd_simulate(const Simulate_options& opts);
void cmd_hyperparams(const Hyperparams_options& opts);
void cmd_analyze(const Analyze_options& opts);
void cmd_metrics(const Metrics_options& opts);

// Reruns the command recorded in a manifest. `out` redirects the outputs.
void cmd_replay(const fs::path& manifest, const std::optional<fs::path>& out);

}  // namespace crj::tools
