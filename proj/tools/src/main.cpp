#include <iostream>

#include <CLI11.hpp>

#include "crj/version.hpp"
#include "crj_tools/commands.hpp"

namespace {

using crj::tools::Common_options;

// Flags shared by the commands; each mirrors an environment variable with the
// CRJ_ prefix.
void add_common(CLI::App* cmd, Common_options& opts, bool with_seed) {
  if (with_seed) {
    cmd->add_option("--seed", opts.seed, "Base random seed")->envname("CRJ_SEED");
  }
  cmd->add_option("--workers", opts.workers, "Worker threads (0 = hardware concurrency)")
      ->envname("CRJ_WORKERS")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--config", opts.config, "JSON configuration file")->envname("CRJ_CONFIG");
}

}  // namespace

int main(int argc, char** argv) {
  auto app = CLI::App{"Compound reversible-jump MCMC photobleach step counting", "crjmcmc"};
  app.set_version_flag("--version", crj::k_version);
  app.require_subcommand(1);

  auto sim = crj::tools::Simulate_options{};
  auto* simulate = app.add_subcommand("simulate", "Simulate a grid of traces with ground truth");
  add_common(simulate, sim.common, true);
  simulate->add_option("--out", sim.out, "Output directory")->envname("CRJ_OUT")->required();

  auto hyp = crj::tools::Hyperparams_options{};
  auto heterogeneous = false;
  auto* hyperparams = app.add_subcommand("hyperparams", "Estimate and pool intensity hyperparameters per group");
  add_common(hyperparams, hyp.common, false);
  hyperparams->add_option("inputs", hyp.inputs, "Trace CSV files or glob patterns")->required();
  hyperparams->add_option("--out", hyp.out, "Output JSON file")->envname("CRJ_OUT")->required();
  hyperparams->add_option("--tag", hyp.tag, "Single group label for all traces");
  hyperparams->add_flag("--heterogeneous", heterogeneous, "Weight traces for heterogeneous pools");

  auto ana = crj::tools::Analyze_options{};
  auto* analyze = app.add_subcommand("analyze", "Run the sampler on each trace");
  add_common(analyze, ana.common, true);
  analyze->add_option("inputs", ana.inputs, "Trace CSV files or glob patterns")->required();
  analyze->add_option("--hyper", ana.hyper, "Hyperparameter JSON")->envname("CRJ_HYPER")->required();
  analyze->add_option("--out", ana.out, "Output directory")->envname("CRJ_OUT")->required();
  analyze->add_option("--max-iter", ana.max_iter, "Iteration cap per chain")
      ->envname("CRJ_MAX_ITER")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--psrf-threshold", ana.psrf_threshold, "PSRF convergence threshold")
      ->envname("CRJ_PSRF_THRESHOLD")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--tag", ana.tag, "Hyperparameter group for all traces");
  analyze->add_flag("--samples", ana.write_samples, "Also write per-chain sample CSVs");

  auto met = crj::tools::Metrics_options{};
  auto* metrics = app.add_subcommand("metrics", "Score posterior summaries against ground truth");
  metrics->add_option("estimates", met.estimates, "Directory of posterior summary JSON files")->required();
  metrics->add_option("truth", met.truth, "Directory of ground-truth JSON files")->required();
  metrics->add_option("--out", met.out, "Output CSV")->envname("CRJ_OUT")->required();

  auto manifest = std::filesystem::path{};
  auto replay_out = std::optional<std::filesystem::path>{};
  auto* replay = app.add_subcommand("replay", "Rerun the command recorded in a manifest");
  replay->add_option("manifest", manifest, "Manifest JSON")->required();
  replay->add_option("--out", replay_out, "Redirect outputs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      crj::tools::cmd_simulate(sim);
    } else if (hyperparams->parsed()) {
      hyp.weighting = heterogeneous ? crj::Pool_weighting::heterogeneous : crj::Pool_weighting::homogeneous;
      crj::tools::cmd_hyperparams(hyp);
    } else if (analyze->parsed()) {
      crj::tools::cmd_analyze(ana);
    } else if (metrics->parsed()) {
      crj::tools::cmd_metrics(met);
    } else if (replay->parsed()) {
      crj::tools::cmd_replay(manifest, replay_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
