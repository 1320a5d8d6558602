#include "crj/moves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crj/error.hpp"

namespace crj {

namespace {

constexpr double k_neg_inf = -std::numeric_limits<double>::infinity();

auto safe_log(double x) -> double { return x > 0.0 ? std::log(x) : k_neg_inf; }

struct Scored_state {
  Change_point_state state;
  double log_likelihood = 0.0;
};

auto score(const Move_context& ctx, std::vector<double> locations) -> std::optional<Scored_state> {
  auto dwellings = summarize_dwellings(ctx.trace, locations);
  if (!dwellings) {
    return std::nullopt;
  }
  auto means = std::vector<double>(dwellings->size());
  for (std::size_t j = 0; j < means.size(); ++j) {
    means[j] = (*dwellings)[j].mean;
  }
  auto state = Change_point_state{};
  state.locations = std::move(locations);
  state.counts = fit_counts_from_means(means, ctx.params);
  auto pairs = classify_short_pairs(state, ctx.hyper.tau);
  state.short_flags = std::move(pairs.flags);
  state.short_count = pairs.short_count;
  auto ll = log_likelihood(*dwellings, state.counts, ctx.params);
  return Scored_state{std::move(state), ll};
}

auto current_log_likelihood(const Move_context& ctx, const Change_point_state& state) -> double {
  auto dwellings = summarize_dwellings(ctx.trace, state.locations);
  if (!dwellings) {
    throw Error{"moves: current state has an empty dwelling"};
  }
  return log_likelihood(*dwellings, state.counts, ctx.params);
}

auto grid_indices(const Move_context& ctx, const Change_point_state& state) -> std::vector<std::size_t> {
  auto result = std::vector<std::size_t>(state.locations.size());
  for (std::size_t i = 0; i < result.size(); ++i) {
    result[i] = ctx.dist.index_of(state.locations[i]);
  }
  return result;
}

// Shared terms of every ratio: target density of y over x (without the
// dimension-specific proposal bookkeeping).
auto log_target_ratio(const Move_context& ctx, const Scored_state& y, const Change_point_state& x, double x_ll)
    -> double {
  const auto& t = ctx.table;
  auto L = ctx.trace.length();
  return t.log_prior_k(y.state.num_change_points()) - t.log_prior_k(x.num_change_points()) +
         t.log_prior_short(y.state.short_count) - t.log_prior_short(x.short_count) +
         log_location_prior(y.state.locations, L) - log_location_prior(x.locations, L) + y.log_likelihood - x_ll;
}

// Birth of grid point g taking `small` to `large`.
auto birth_log_ratio(const Move_context& ctx, const Change_point_state& small, double small_ll,
                     const Scored_state& large, std::size_t g) -> double {
  auto k = small.num_change_points();
  auto b = ctx.table.at(k, small.short_count).birth;
  auto d = ctx.table.at(k + 1, large.state.short_count).death;
  return log_target_ratio(ctx, large, small, small_ll) + safe_log(d) - safe_log(b) -
         std::log(ctx.dist.density(g)) - std::log(static_cast<double>(k + 1));
}

auto log_duration_density(const Move_context& ctx, int steps) -> double {
  auto h = ctx.dist.spacing();
  auto rate = ctx.hyper.lambda_d() * h;
  auto m = static_cast<double>(steps);
  // P(m) / h for the duration discretized up to the grid, times the gate.
  return std::log(-std::expm1(-rate)) - rate * (m - 1.0) - std::log(h) - rate * m;
}

// Probability of choosing the pair (first, first + 1) in a remove move.
auto removal_probability(const Change_point_state& state, int first, double tau) -> double {
  if (state.short_count < 2) {
    return 0.0;
  }
  auto flagged = [&](int i) { return state.short_flags[static_cast<std::size_t>(i)]; };
  if (!flagged(first) || !flagged(first + 1) || !forms_short_pair(state.locations, state.counts, first, tau)) {
    return 0.0;
  }
  auto a = static_cast<double>(removal_partners(state, first, tau).size());
  auto b = static_cast<double>(removal_partners(state, first + 1, tau).size());
  return (1.0 / a + 1.0 / b) / static_cast<double>(state.short_count);
}

// Adding the pair starting at change point `first` of `large`, proposed from
// centre grid index c with a duration of `steps` grid spacings.
auto add_log_ratio(const Move_context& ctx, const Change_point_state& small, double small_ll,
                   const Scored_state& large, std::size_t c, int steps, int first) -> double {
  auto k = small.num_change_points();
  auto a = ctx.table.at(k, small.short_count).add_short;
  auto r = ctx.table.at(k + 2, large.state.short_count).remove_short;
  auto reverse = removal_probability(large.state, first, ctx.hyper.tau);
  return log_target_ratio(ctx, large, small, small_ll) + safe_log(r) + safe_log(reverse) - safe_log(a) -
         std::log(ctx.dist.density(c)) - log_duration_density(ctx, steps);
}

auto invalid_outcome(const Change_point_state& current, Move_kind kind) -> Move_outcome {
  return Move_outcome{current, k_neg_inf, false, kind};
}

auto finish(std::optional<Proposal> proposal, const Change_point_state& current, Move_kind kind, Rng& rng)
    -> Move_outcome {
  if (!proposal) {
    return invalid_outcome(current, kind);
  }
  auto lr = proposal->log_ratio;
  auto accepted = lr >= 0.0 || (lr > k_neg_inf && std::log(uniform01(rng)) < lr);
  return Move_outcome{std::move(proposal->state), lr, accepted, kind};
}

auto uniform_int(int n, Rng& rng) -> int { return std::uniform_int_distribution<int>{0, n - 1}(rng); }

}  // namespace

auto to_string(Move_kind kind) -> std::string_view {
  switch (kind) {
    case Move_kind::birth:
      return "birth";
    case Move_kind::death:
      return "death";
    case Move_kind::shift:
      return "shift";
    case Move_kind::add_short:
      return "add_short";
    case Move_kind::remove_short:
      return "remove_short";
  }
  return "unknown";
}

Move_table::Move_table(const Hyperparams& hyper)
    : k_max_{hyper.k_max}, lambda_{hyper.lambda}, lambda_t_{hyper.lambda_t} {
  if (k_max_ < 0) {
    throw Error{"move table: k_max must be non-negative"};
  }
  if (!(lambda_ > 0.0) || !(lambda_t_ > 0.0)) {
    throw Error{"move table: Poisson means must be positive"};
  }
  auto ratio = [](double log_to, double log_from) { return std::min(1.0, std::exp(log_to - log_from)); };

  rows_.assign(static_cast<std::size_t>(k_max_) + 1, {});
  auto max_bd = 0.0;
  auto max_ar = 0.0;
  for (auto k = 0; k <= k_max_; ++k) {
    auto& row = rows_[static_cast<std::size_t>(k)];
    row.resize(static_cast<std::size_t>(k) + 1);
    for (auto kt = 0; kt <= k; ++kt) {
      auto& p = row[static_cast<std::size_t>(kt)];
      auto here = log_prior_k(k) + log_prior_short(kt);
      p.birth = k < k_max_ ? ratio(log_prior_k(k + 1), log_prior_k(k)) : 0.0;
      p.death = k > 0 ? ratio(log_prior_k(k - 1), log_prior_k(k)) : 0.0;
      p.add_short = k + 2 <= k_max_ ? ratio(log_prior_k(k + 2) + log_prior_short(kt + 2), here) : 0.0;
      p.remove_short = kt >= 2 ? ratio(log_prior_k(k - 2) + log_prior_short(kt - 2), here) : 0.0;
      max_bd = std::max(max_bd, p.birth + p.death);
      max_ar = std::max(max_ar, p.add_short + p.remove_short);
    }
  }
  c_ = max_bd > 0.0 ? hyper.birth_death_cap / max_bd : 0.0;
  gamma_ = max_ar > 0.0 ? hyper.short_state_cap / max_ar : 0.0;
  for (auto& row : rows_) {
    for (auto& p : row) {
      p.birth *= c_;
      p.death *= c_;
      p.add_short *= gamma_;
      p.remove_short *= gamma_;
      p.shift = 1.0 - p.birth - p.death - p.add_short - p.remove_short;
    }
  }
}

auto Move_table::at(int k, int k_t) const -> const Move_probabilities& {
  if (k < 0 || k > k_max_ || k_t < 0 || k_t > k) {
    throw Error{"move table: require 0 <= k_t <= k <= k_max"};
  }
  return rows_[static_cast<std::size_t>(k)][static_cast<std::size_t>(k_t)];
}

auto Move_table::log_prior_k(int k) const -> double {
  return k < 0 ? k_neg_inf : k * std::log(lambda_) - std::lgamma(k + 1.0);
}

auto Move_table::log_prior_short(int k_t) const -> double {
  return k_t < 0 ? k_neg_inf : k_t * std::log(lambda_t_) - std::lgamma(k_t + 1.0);
}

auto move_probabilities(int k, int k_t, const Hyperparams& hyper) -> Move_probabilities {
  return Move_table{hyper}.at(k, k_t);
}

auto duration_accept_probability(double d, const Hyperparams& hyper) -> double {
  return std::exp(-hyper.lambda_d() * d);
}

auto duration_accept(double d, const Hyperparams& hyper, Rng& rng) -> bool {
  return uniform01(rng) < duration_accept_probability(d, hyper);
}

auto short_state_positions(double centre, double duration) -> std::pair<double, double> {
  return {centre - 0.5 * duration, centre + 0.5 * duration};
}

auto forms_short_pair(std::span<const double> locations, std::span<const int> counts, int i, double tau) -> bool {
  auto k = static_cast<int>(locations.size());
  if (i < 0 || i + 1 >= k) {
    return false;
  }
  auto u = static_cast<std::size_t>(i);
  auto returns = counts[u] == counts[u + 2] && counts[u + 1] != counts[u];
  return returns && locations[u + 1] - locations[u] <= tau * (1.0 + 1e-12);
}

auto classify_short_pairs(const Change_point_state& state, double tau) -> Short_pairs {
  auto k = state.num_change_points();
  auto result = Short_pairs{0, std::vector<bool>(static_cast<std::size_t>(k), false)};
  for (auto i = 0; i + 1 < k;) {
    if (forms_short_pair(state.locations, state.counts, i, tau)) {
      result.flags[static_cast<std::size_t>(i)] = true;
      result.flags[static_cast<std::size_t>(i) + 1] = true;
      result.short_count += 2;
      i += 2;
    } else {
      i += 1;
    }
  }
  return result;
}

auto classify_short_pairs(const Change_point_state& state, const Hyperparams& hyper) -> Short_pairs {
  return classify_short_pairs(state, hyper.tau);
}

auto removal_partners(const Change_point_state& state, int p, double tau) -> std::vector<int> {
  auto result = std::vector<int>{};
  auto k = state.num_change_points();
  auto flagged = [&](int i) { return i >= 0 && i < k && state.short_flags[static_cast<std::size_t>(i)]; };
  if (!flagged(p)) {
    return result;
  }
  if (flagged(p - 1) && forms_short_pair(state.locations, state.counts, p - 1, tau)) {
    result.push_back(p - 1);
  }
  if (flagged(p + 1) && forms_short_pair(state.locations, state.counts, p, tau)) {
    result.push_back(p + 1);
  }
  return result;
}

auto make_state(const Move_context& ctx, std::vector<double> locations) -> std::optional<Change_point_state> {
  auto scored = score(ctx, std::move(locations));
  if (!scored) {
    return std::nullopt;
  }
  return std::move(scored->state);
}

auto evaluate_birth(const Move_context& ctx, const Change_point_state& current, std::size_t grid_index)
    -> std::optional<Proposal> {
  auto k = current.num_change_points();
  if (k >= ctx.table.k_max() || grid_index >= ctx.dist.size()) {
    return std::nullopt;
  }
  auto indices = grid_indices(ctx, current);
  if (std::find(indices.begin(), indices.end(), grid_index) != indices.end()) {
    return std::nullopt;
  }
  auto t = ctx.dist.time_at(grid_index);
  auto locations = current.locations;
  locations.insert(std::upper_bound(locations.begin(), locations.end(), t), t);
  auto large = score(ctx, std::move(locations));
  if (!large) {
    return std::nullopt;
  }
  auto lr = birth_log_ratio(ctx, current, current_log_likelihood(ctx, current), *large, grid_index);
  return Proposal{std::move(large->state), lr};
}

auto evaluate_death(const Move_context& ctx, const Change_point_state& current, int point)
    -> std::optional<Proposal> {
  auto k = current.num_change_points();
  if (point < 0 || point >= k) {
    return std::nullopt;
  }
  auto g = ctx.dist.index_of(current.locations[static_cast<std::size_t>(point)]);
  auto locations = current.locations;
  locations.erase(locations.begin() + point);
  auto small = score(ctx, std::move(locations));
  if (!small) {
    return std::nullopt;
  }
  auto large = Scored_state{current, current_log_likelihood(ctx, current)};
  auto lr = -birth_log_ratio(ctx, small->state, small->log_likelihood, large, g);
  return Proposal{std::move(small->state), lr};
}

auto evaluate_shift(const Move_context& ctx, const Change_point_state& current, int point, std::size_t grid_index)
    -> std::optional<Proposal> {
  auto k = current.num_change_points();
  if (point < 0 || point >= k) {
    return std::nullopt;
  }
  auto j = static_cast<std::size_t>(point);
  auto indices = grid_indices(ctx, current);
  auto lo = j == 0 ? std::size_t{0} : indices[j - 1] + 1;
  auto hi = j + 1 == indices.size() ? ctx.dist.size() - 1 : indices[j + 1] - 1;
  if (grid_index < lo || grid_index > hi) {
    return std::nullopt;
  }
  auto old_index = indices[j];
  if (grid_index == old_index) {
    return Proposal{current, 0.0};
  }
  auto locations = current.locations;
  locations[j] = ctx.dist.time_at(grid_index);
  auto moved = score(ctx, std::move(locations));
  if (!moved) {
    return std::nullopt;
  }
  auto pi_x = ctx.table.at(k, current.short_count).shift;
  auto pi_y = ctx.table.at(k, moved->state.short_count).shift;
  auto lr = log_target_ratio(ctx, *moved, current, current_log_likelihood(ctx, current)) + safe_log(pi_y) -
            safe_log(pi_x) + std::log(ctx.dist.mass(old_index)) - std::log(ctx.dist.mass(grid_index));
  return Proposal{std::move(moved->state), lr};
}

auto evaluate_add_short(const Move_context& ctx, const Change_point_state& current, std::size_t centre_index,
                        int steps) -> std::optional<Proposal> {
  auto k = current.num_change_points();
  if (k + 2 > ctx.table.k_max() || steps < 1 || centre_index >= ctx.dist.size()) {
    return std::nullopt;
  }
  auto first = static_cast<long long>(centre_index) - steps / 2;
  auto second = first + steps;
  if (first < 0 || second >= static_cast<long long>(ctx.dist.size())) {
    return std::nullopt;
  }
  auto i1 = static_cast<std::size_t>(first);
  auto i2 = static_cast<std::size_t>(second);
  auto indices = grid_indices(ctx, current);
  // Both points must land strictly inside one dwelling.
  auto pos = std::lower_bound(indices.begin(), indices.end(), i1);
  if (pos != indices.end() && *pos <= i2) {
    return std::nullopt;
  }
  auto insert_at = static_cast<int>(pos - indices.begin());
  auto locations = current.locations;
  locations.insert(locations.begin() + insert_at, {ctx.dist.time_at(i1), ctx.dist.time_at(i2)});
  auto large = score(ctx, std::move(locations));
  if (!large) {
    return std::nullopt;
  }
  auto lr = add_log_ratio(ctx, current, current_log_likelihood(ctx, current), *large, centre_index, steps,
                          insert_at);
  return Proposal{std::move(large->state), lr};
}

auto evaluate_remove_short(const Move_context& ctx, const Change_point_state& current, int first)
    -> std::optional<Proposal> {
  auto k = current.num_change_points();
  if (first < 0 || first + 1 >= k || removal_probability(current, first, ctx.hyper.tau) <= 0.0) {
    return std::nullopt;
  }
  auto u = static_cast<std::size_t>(first);
  auto i1 = ctx.dist.index_of(current.locations[u]);
  auto i2 = ctx.dist.index_of(current.locations[u + 1]);
  auto steps = static_cast<int>(i2 - i1);
  auto centre = i1 + static_cast<std::size_t>(steps / 2);
  auto locations = current.locations;
  locations.erase(locations.begin() + first, locations.begin() + first + 2);
  auto small = score(ctx, std::move(locations));
  if (!small) {
    return std::nullopt;
  }
  auto large = Scored_state{current, current_log_likelihood(ctx, current)};
  auto lr = -add_log_ratio(ctx, small->state, small->log_likelihood, large, centre, steps, first);
  return Proposal{std::move(small->state), lr};
}

auto birth_move(const Move_context& ctx, const Change_point_state& current, Rng& rng) -> Move_outcome {
  auto g = ctx.dist.sample(rng);
  return finish(evaluate_birth(ctx, current, g), current, Move_kind::birth, rng);
}

auto death_move(const Move_context& ctx, const Change_point_state& current, Rng& rng) -> Move_outcome {
  auto k = current.num_change_points();
  if (k < 1) {
    return invalid_outcome(current, Move_kind::death);
  }
  auto point = uniform_int(k, rng);
  return finish(evaluate_death(ctx, current, point), current, Move_kind::death, rng);
}

auto shift_move(const Move_context& ctx, const Change_point_state& current, Rng& rng) -> Move_outcome {
  auto k = current.num_change_points();
  if (k < 1) {
    return invalid_outcome(current, Move_kind::shift);
  }
  auto point = uniform_int(k, rng);
  auto j = static_cast<std::size_t>(point);
  auto lo = j == 0 ? std::size_t{0} : ctx.dist.index_of(current.locations[j - 1]) + 1;
  auto hi = j + 1 == current.locations.size() ? ctx.dist.size() - 1
                                               : ctx.dist.index_of(current.locations[j + 1]) - 1;
  auto g = ctx.dist.sample_between(lo, hi, rng);
  return finish(evaluate_shift(ctx, current, point, g), current, Move_kind::shift, rng);
}

auto add_short_state_move(const Move_context& ctx, const Change_point_state& current, Rng& rng) -> Move_outcome {
  auto centre = ctx.dist.sample(rng);
  auto d = std::exponential_distribution<double>{ctx.hyper.lambda_d()}(rng);
  auto steps = std::max(1, static_cast<int>(std::ceil(d / ctx.dist.spacing())));
  if (!duration_accept(steps * ctx.dist.spacing(), ctx.hyper, rng)) {
    return invalid_outcome(current, Move_kind::add_short);
  }
  return finish(evaluate_add_short(ctx, current, centre, steps), current, Move_kind::add_short, rng);
}

auto remove_short_state_move(const Move_context& ctx, const Change_point_state& current, Rng& rng)
    -> Move_outcome {
  if (current.short_count < 2) {
    return invalid_outcome(current, Move_kind::remove_short);
  }
  auto flagged = std::vector<int>{};
  for (auto i = 0; i < current.num_change_points(); ++i) {
    if (current.short_flags[static_cast<std::size_t>(i)]) {
      flagged.push_back(i);
    }
  }
  auto p = flagged[static_cast<std::size_t>(uniform_int(static_cast<int>(flagged.size()), rng))];
  auto partners = removal_partners(current, p, ctx.hyper.tau);
  if (partners.empty()) {
    return invalid_outcome(current, Move_kind::remove_short);
  }
  auto q = partners[static_cast<std::size_t>(uniform_int(static_cast<int>(partners.size()), rng))];
  return finish(evaluate_remove_short(ctx, current, std::min(p, q)), current, Move_kind::remove_short, rng);
}

auto draw_move_kind(const Move_probabilities& probs, Rng& rng) -> Move_kind {
  auto u = uniform01(rng);
  if ((u -= probs.birth) < 0.0) {
    return Move_kind::birth;
  }
  if ((u -= probs.death) < 0.0) {
    return Move_kind::death;
  }
  if ((u -= probs.add_short) < 0.0) {
    return Move_kind::add_short;
  }
  if ((u -= probs.remove_short) < 0.0) {
    return Move_kind::remove_short;
  }
  return Move_kind::shift;
}

auto change_point_move(const Move_context& ctx, const Change_point_state& current, Rng& rng) -> Move_outcome {
  auto kind = draw_move_kind(ctx.table.at(current.num_change_points(), current.short_count), rng);
  switch (kind) {
    case Move_kind::birth:
      return birth_move(ctx, current, rng);
    case Move_kind::death:
      return death_move(ctx, current, rng);
    case Move_kind::add_short:
      return add_short_state_move(ctx, current, rng);
    case Move_kind::remove_short:
      return remove_short_state_move(ctx, current, rng);
    case Move_kind::shift:
      break;
  }
  return shift_move(ctx, current, rng);
}

}  // namespace crj
