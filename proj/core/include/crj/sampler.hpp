#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crj/moves.hpp"
#include "crj/proposal.hpp"
#include "crj/rng.hpp"
#include "crj/types.hpp"

namespace crj {

struct Chain_config {
  int n_iter = 20000;
  double burn_in_fraction = 0.5;
  int extension = 10000;
  int max_iter = 100000;
  int n_chains = 3;
  double psrf_threshold = 1.2;
  std::uint64_t seed = 0;
  // Worker threads used for the chains of one trace; 0 means one per chain.
  int threads = 0;
};

void validate(const Chain_config& config);

struct Chain_record {
  std::vector<double> locations;
  std::vector<int> counts;
  int short_count = 0;
  Intensity_params params;
  double log_posterior = 0.0;
  Move_kind move = Move_kind::shift;
  bool accepted = false;

  auto k() const -> int { return static_cast<int>(locations.size()); }
};

using Chain_sample = std::vector<Chain_record>;

// Log of the grid posterior up to a constant: likelihood, P(k) P_t(k_t), the
// order-statistic location prior times spacing^k, and the intensity priors.
auto log_posterior(const Trace& trace, const Proposal_distribution& dist, const Move_table& table,
                   const Hyperparams& hyper, const Change_point_state& state, const Intensity_params& params)
    -> double;

// Initial state: one change point at the pmf argmax with fitted counts.
auto initial_state(const Trace& trace, const Proposal_distribution& dist, const Hyperparams& hyper,
                   const Intensity_params& params) -> Change_point_state;

// Intensity parameters at the prior means (eta) and variance prior modes.
auto initial_params(const Hyperparams& hyper) -> Intensity_params;

// A resumable chain. Each iteration refits the counts of the current state
// under the current parameters, performs one change-point move and then one
// Gibbs sweep over the intensity parameters.
class Chain {
 public:
  Chain(const Trace& trace, const Proposal_distribution& dist, const Hyperparams& hyper,
        Change_point_state state, Intensity_params params, std::uint64_t seed);

  void run(int iterations);

  auto sample() const -> const Chain_sample& { return sample_; }
  auto state() const -> const Change_point_state& { return state_; }
  auto params() const -> const Intensity_params& { return params_; }

 private:
  const Trace* trace_;
  const Proposal_distribution* dist_;
  Hyperparams hyper_;
  Move_table table_;
  Rng rng_;
  Change_point_state state_;
  Intensity_params params_;
  Chain_sample sample_;
};

auto run_chain(const Trace& trace, const Proposal_distribution& dist, const Hyperparams& hyper,
               const Intensity_params& params_init, int iterations, std::uint64_t chain_seed) -> Chain_sample;

struct Convergence_report {
  bool converged = false;
  std::pair<int, int> pair{-1, -1};
  double psrf_k = 0.0;
  std::vector<int> modal_k;  // per chain of the reported pair
  std::size_t retained = 0;
  std::vector<double> psrf_locations;
  std::array<double, 4> psrf_params{};
  std::string reason;
};

// First floor(fraction * n) records are burn-in.
auto burn_in_count(std::size_t n, double fraction) -> std::size_t;

// Most frequent k after burn-in; ties go to the smaller k.
auto modal_k(std::span<const Chain_record> records) -> int;

// Block protocol on one pair: PSRF of k, agreement of modal k, PSRF of each
// location over modal-k iterations truncated to the common count, then PSRF
// of the four intensity parameters.
auto check_pair(const Chain_sample& a, const Chain_sample& b, const Chain_config& config) -> Convergence_report;

// Converged iff some pair passes every block; pairs are tried in index order.
auto check_convergence(std::span<const Chain_sample> chains, const Chain_config& config) -> Convergence_report;

struct Posterior_summary {
  int modal_k = 0;
  double modal_k_probability = 0.0;
  std::vector<double> change_points;
  std::vector<int> dwelling_counts;
  std::vector<int> frame_counts;
  std::vector<double> predicted_intensity;
  Intensity_params posterior_mean;
  // 2.5% and 97.5% quantiles of mu_f, mu_b, sigma_f2, sigma_b2.
  std::array<std::pair<double, double>, 4> credible_intervals{};
  std::array<double, 4> ess{};
  std::array<double, 4> mcse{};
  bool converged = false;
  int iterations = 0;  // per chain
  Convergence_report convergence;
};

// Builds the summary from post-burn-in draws of the given chains.
auto summarize(const Trace& trace, const Proposal_distribution& dist, std::span<const Chain_sample> chains,
               double burn_in_fraction) -> Posterior_summary;

struct Analysis {
  Posterior_summary summary;
  std::vector<Chain_sample> chains;
};

// Full per-trace pipeline: proposal, initialization, parallel chains,
// convergence-gated extension rounds and the posterior summary. Chain i uses
// seed derive_seed(config.seed, i).
auto analyze(const Trace& trace, const Hyperparams& hyper, const Chain_config& config) -> Analysis;

}  // namespace crj
