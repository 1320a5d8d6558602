#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "crj/model.hpp"
#include "crj/proposal.hpp"
#include "crj/rng.hpp"
#include "crj/types.hpp"

namespace crj {

enum class Move_kind { birth, death, shift, add_short, remove_short };

auto to_string(Move_kind kind) -> std::string_view;

struct Move_probabilities {
  double birth = 0.0;
  double death = 0.0;
  double add_short = 0.0;
  double remove_short = 0.0;
  double shift = 0.0;
};

// b_k, d_k, a_{k,k_t}, r_{k,k_t} and pi_{k,k_t} for every 0 <= k_t <= k <= k_max.
//
// b_k = c min(1, P(k+1)/P(k)), d_{k+1} = c min(1, P(k)/P(k+1)) with P the
// Poisson(lambda) pmf; c is the largest constant keeping b_k + d_k below
// birth_death_cap for all k. The add/remove pair uses the product
// P(k) P_t(k_t) and a constant gamma chosen the same way against
// short_state_cap. Shift takes the remaining mass.
class Move_table {
 public:
  explicit Move_table(const Hyperparams& hyper);

  auto at(int k, int k_t) const -> const Move_probabilities&;
  auto k_max() const -> int { return k_max_; }

  auto birth_death_scale() const -> double { return c_; }
  auto short_state_scale() const -> double { return gamma_; }

  // Unnormalized Poisson log pmfs; truncation constants cancel in every ratio.
  auto log_prior_k(int k) const -> double;
  auto log_prior_short(int k_t) const -> double;

 private:
  int k_max_;
  double lambda_;
  double lambda_t_;
  double c_ = 0.0;
  double gamma_ = 0.0;
  std::vector<std::vector<Move_probabilities>> rows_;
};

auto move_probabilities(int k, int k_t, const Hyperparams& hyper) -> Move_probabilities;

// exp(-lambda_D d) with lambda_D = -log(p) / tau.
auto duration_accept_probability(double d, const Hyperparams& hyper) -> double;
auto duration_accept(double d, const Hyperparams& hyper, Rng& rng) -> bool;

// (centre - d/2, centre + d/2).
auto short_state_positions(double centre, double duration) -> std::pair<double, double>;

struct Short_pairs {
  int short_count = 0;
  std::vector<bool> flags;
};

// Change points i and i+1 bound a deviation that returns to the prior level
// and are at most tau apart.
auto forms_short_pair(std::span<const double> locations, std::span<const int> counts, int i, double tau) -> bool;

// Greedy left-to-right pairing; each change point joins at most one pair.
auto classify_short_pairs(const Change_point_state& state, double tau) -> Short_pairs;
auto classify_short_pairs(const Change_point_state& state, const Hyperparams& hyper) -> Short_pairs;

// Flagged neighbours of flagged point p that form a short-lived pair with it.
auto removal_partners(const Change_point_state& state, int p, double tau) -> std::vector<int>;

// Everything a move needs besides the state and the random stream.
struct Move_context {
  const Trace& trace;
  const Proposal_distribution& dist;
  const Hyperparams& hyper;
  const Move_table& table;
  const Intensity_params& params;
};

// Fits counts and labels short-lived pairs for the given locations; nullopt
// for configurations with an empty dwelling.
auto make_state(const Move_context& ctx, std::vector<double> locations) -> std::optional<Change_point_state>;

// A fully evaluated candidate. log_ratio is the unclamped log acceptance
// ratio (-inf for proposals that must be rejected).
struct Proposal {
  Change_point_state state;
  double log_ratio = 0.0;
};

auto evaluate_birth(const Move_context& ctx, const Change_point_state& current, std::size_t grid_index)
    -> std::optional<Proposal>;
auto evaluate_death(const Move_context& ctx, const Change_point_state& current, int point)
    -> std::optional<Proposal>;
auto evaluate_shift(const Move_context& ctx, const Change_point_state& current, int point, std::size_t grid_index)
    -> std::optional<Proposal>;
// New pair at grid indices centre - floor(steps/2) and that plus steps, i.e.
// a duration of steps * spacing centred on the drawn grid point.
auto evaluate_add_short(const Move_context& ctx, const Change_point_state& current, std::size_t centre_index,
                        int steps) -> std::optional<Proposal>;
// Removes change points `first` and `first + 1`.
auto evaluate_remove_short(const Move_context& ctx, const Change_point_state& current, int first)
    -> std::optional<Proposal>;

struct Move_outcome {
  Change_point_state proposed_state;
  double log_acceptance = 0.0;
  bool accepted = false;
  Move_kind kind = Move_kind::shift;
};

// Stochastic moves. `current` must carry counts and flags consistent with
// ctx.params (see make_state).
auto birth_move(const Move_context& ctx, const Change_point_state& current, Rng& rng) -> Move_outcome;
auto death_move(const Move_context& ctx, const Change_point_state& current, Rng& rng) -> Move_outcome;
auto shift_move(const Move_context& ctx, const Change_point_state& current, Rng& rng) -> Move_outcome;
auto add_short_state_move(const Move_context& ctx, const Change_point_state& current, Rng& rng) -> Move_outcome;
auto remove_short_state_move(const Move_context& ctx, const Change_point_state& current, Rng& rng)
    -> Move_outcome;

auto draw_move_kind(const Move_probabilities& probs, Rng& rng) -> Move_kind;

// Draws a move kind from the table and runs it.
auto change_point_move(const Move_context& ctx, const Change_point_state& current, Rng& rng) -> Move_outcome;

}  // namespace crj
