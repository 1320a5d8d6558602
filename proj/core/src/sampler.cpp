#include "crj/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "crj/diagnostics.hpp"
#include "crj/error.hpp"
#include "crj/gibbs.hpp"
#include "crj/model.hpp"

namespace crj {

namespace {

constexpr std::size_t k_min_retained = 10;

auto param_value(const Intensity_params& p, std::size_t i) -> double {
  switch (i) {
    case 0:
      return p.mu_f;
    case 1:
      return p.mu_b;
    case 2:
      return p.sigma_f2;
    default:
      return p.sigma_b2;
  }
}

auto quantile(std::vector<double> v, double q) -> double {
  std::sort(v.begin(), v.end());
  auto pos = q * static_cast<double>(v.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  auto hi = std::min(lo + 1, v.size() - 1);
  auto frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

// Runs task(i) for i in [0, n) on at most `threads` workers.
template <typename Task>
void parallel_for(int n, int threads, Task task) {
  auto workers = threads <= 0 ? n : std::min(n, threads);
  if (workers <= 1) {
    for (auto i = 0; i < n; ++i) {
      task(i);
    }
    return;
  }
  auto next = std::atomic<int>{0};
  auto pool = std::vector<std::thread>{};
  for (auto w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (auto i = next++; i < n; i = next++) {
        task(i);
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
}

auto post_burn_in(const Chain_sample& chain, double fraction) -> std::span<const Chain_record> {
  auto skip = burn_in_count(chain.size(), fraction);
  return std::span<const Chain_record>{chain}.subspan(skip);
}

}  // namespace

void validate(const Chain_config& config) {
  if (config.n_iter < 0 || config.extension < 1 || config.max_iter < 0) {
    throw Error{"chain config: iteration counts must be non-negative and extension positive"};
  }
  if (!(config.burn_in_fraction > 0.0) || !(config.burn_in_fraction < 1.0)) {
    throw Error{"chain config: burn_in_fraction must lie in (0, 1)"};
  }
  if (config.n_chains < 2) {
    throw Error{"chain config: at least two chains are needed for convergence testing"};
  }
  if (!(config.psrf_threshold >= 1.0)) {
    throw Error{"chain config: psrf_threshold must be at least 1"};
  }
}

auto log_posterior(const Trace& trace, const Proposal_distribution& dist, const Move_table& table,
                   const Hyperparams& hyper, const Change_point_state& state, const Intensity_params& params)
    -> double {
  auto k = state.num_change_points();
  return log_likelihood(trace, state, params) + table.log_prior_k(k) + table.log_prior_short(state.short_count) +
         log_location_prior(state.locations, trace.length()) + k * std::log(dist.spacing()) +
         log_intensity_prior(params, hyper);
}

auto initial_params(const Hyperparams& hyper) -> Intensity_params {
  return Intensity_params{hyper.eta_f, hyper.eta_b, hyper.beta_f / (hyper.alpha_f + 1.0),
                          hyper.beta_b / (hyper.alpha_b + 1.0)};
}

auto initial_state(const Trace& trace, const Proposal_distribution& dist, const Hyperparams& hyper,
                   const Intensity_params& params) -> Change_point_state {
  auto table = Move_table{hyper};
  auto ctx = Move_context{trace, dist, hyper, table, params};
  auto locations = std::vector<double>{};
  if (hyper.k_max >= 1) {
    locations.push_back(dist.time_at(dist.argmax()));
  }
  auto state = make_state(ctx, locations);
  if (!state) {
    state = make_state(ctx, {});
  }
  return *state;
}

Chain::Chain(const Trace& trace, const Proposal_distribution& dist, const Hyperparams& hyper,
             Change_point_state state, Intensity_params params, std::uint64_t seed)
    : trace_{&trace},
      dist_{&dist},
      hyper_{hyper},
      table_{hyper},
      rng_{seed},
      state_{std::move(state)},
      params_{params} {
  if (!(params_.mu_f > 0.0) || !(params_.sigma_f2 > 0.0) || !(params_.sigma_b2 > 0.0)) {
    throw Error{"chain: initial parameters need mu_f, sigma_f2 and sigma_b2 positive"};
  }
}

void Chain::run(int iterations) {
  sample_.reserve(sample_.size() + static_cast<std::size_t>(std::max(iterations, 0)));
  for (auto it = 0; it < iterations; ++it) {
    auto ctx = Move_context{*trace_, *dist_, hyper_, table_, params_};
    if (auto refit = make_state(ctx, state_.locations)) {
      state_ = std::move(*refit);
    }
    auto outcome = change_point_move(ctx, state_, rng_);
    if (outcome.accepted) {
      state_ = std::move(outcome.proposed_state);
    }
    params_ = gibbs_update(*trace_, state_, params_, hyper_, rng_);
    auto record = Chain_record{};
    record.locations = state_.locations;
    record.counts = state_.counts;
    record.short_count = state_.short_count;
    record.params = params_;
    record.log_posterior = log_posterior(*trace_, *dist_, table_, hyper_, state_, params_);
    record.move = outcome.kind;
    record.accepted = outcome.accepted;
    sample_.push_back(std::move(record));
  }
}

auto run_chain(const Trace& trace, const Proposal_distribution& dist, const Hyperparams& hyper,
               const Intensity_params& params_init, int iterations, std::uint64_t chain_seed) -> Chain_sample {
  auto chain = Chain{trace, dist, hyper, initial_state(trace, dist, hyper, params_init), params_init, chain_seed};
  chain.run(iterations);
  return chain.sample();
}

auto burn_in_count(std::size_t n, double fraction) -> std::size_t {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
}

auto modal_k(std::span<const Chain_record> records) -> int {
  auto freq = std::map<int, std::size_t>{};
  for (const auto& r : records) {
    freq[r.k()] += 1;
  }
  auto best = 0;
  auto best_count = std::size_t{0};
  for (const auto& [k, count] : freq) {
    if (count > best_count) {
      best = k;
      best_count = count;
    }
  }
  return best;
}

auto check_pair(const Chain_sample& a, const Chain_sample& b, const Chain_config& config) -> Convergence_report {
  auto report = Convergence_report{};
  auto n = std::min(a.size(), b.size());
  auto skip = burn_in_count(n, config.burn_in_fraction);
  if (n - skip < 2) {
    report.reason = "too few iterations";
    return report;
  }
  auto ra = std::span<const Chain_record>{a}.subspan(skip, n - skip);
  auto rb = std::span<const Chain_record>{b}.subspan(skip, n - skip);
  auto column = [](std::span<const Chain_record> r, auto get) {
    auto v = std::vector<double>(r.size());
    std::transform(r.begin(), r.end(), v.begin(), get);
    return v;
  };

  auto ks = std::vector<std::vector<double>>{column(ra, [](const auto& r) { return double(r.k()); }),
                                             column(rb, [](const auto& r) { return double(r.k()); })};
  report.psrf_k = psrf(ks);
  report.modal_k = {modal_k(ra), modal_k(rb)};
  if (!(report.psrf_k <= config.psrf_threshold)) {
    report.reason = "psrf of k above threshold";
    return report;
  }
  if (report.modal_k[0] != report.modal_k[1]) {
    report.reason = "modal k differs between chains";
    return report;
  }

  auto mode = report.modal_k[0];
  auto modal_records = [&](std::span<const Chain_record> r) {
    auto kept = std::vector<const Chain_record*>{};
    for (const auto& rec : r) {
      if (rec.k() == mode) {
        kept.push_back(&rec);
      }
    }
    return kept;
  };
  auto ma = modal_records(ra);
  auto mb = modal_records(rb);
  report.retained = std::min(ma.size(), mb.size());
  if (report.retained < k_min_retained) {
    report.reason = "too few modal-k iterations";
    return report;
  }
  // Keep the most recent draws of each chain.
  ma.erase(ma.begin(), ma.end() - static_cast<std::ptrdiff_t>(report.retained));
  mb.erase(mb.begin(), mb.end() - static_cast<std::ptrdiff_t>(report.retained));
  for (auto j = 0; j < mode; ++j) {
    auto coordinate = [&](const std::vector<const Chain_record*>& recs) {
      auto v = std::vector<double>(recs.size());
      for (std::size_t i = 0; i < recs.size(); ++i) {
        v[i] = recs[i]->locations[static_cast<std::size_t>(j)];
      }
      return v;
    };
    auto seqs = std::vector<std::vector<double>>{coordinate(ma), coordinate(mb)};
    report.psrf_locations.push_back(psrf(seqs));
  }
  if (std::any_of(report.psrf_locations.begin(), report.psrf_locations.end(),
                  [&](double r) { return !(r <= config.psrf_threshold); })) {
    report.reason = "psrf of a change-point location above threshold";
    return report;
  }

  for (std::size_t p = 0; p < 4; ++p) {
    auto get = [p](const Chain_record& r) { return param_value(r.params, p); };
    auto seqs = std::vector<std::vector<double>>{column(ra, get), column(rb, get)};
    report.psrf_params[p] = psrf(seqs);
  }
  if (std::any_of(report.psrf_params.begin(), report.psrf_params.end(),
                  [&](double r) { return !(r <= config.psrf_threshold); })) {
    report.reason = "psrf of an intensity parameter above threshold";
    return report;
  }
  report.converged = true;
  report.reason = "converged";
  return report;
}

auto check_convergence(std::span<const Chain_sample> chains, const Chain_config& config) -> Convergence_report {
  if (chains.size() < 2) {
    throw Error{"check_convergence: at least two chains are required"};
  }
  auto first = Convergence_report{};
  auto have_first = false;
  for (std::size_t i = 0; i < chains.size(); ++i) {
    for (auto j = i + 1; j < chains.size(); ++j) {
      auto report = check_pair(chains[i], chains[j], config);
      report.pair = {static_cast<int>(i), static_cast<int>(j)};
      if (report.converged) {
        return report;
      }
      if (!have_first) {
        first = std::move(report);
        have_first = true;
      }
    }
  }
  return first;
}

auto summarize(const Trace& trace, const Proposal_distribution& dist, std::span<const Chain_sample> chains,
               double burn_in_fraction) -> Posterior_summary {
  auto pooled = std::vector<const Chain_record*>{};
  auto per_param = std::array<std::vector<double>, 4>{};
  auto summary = Posterior_summary{};
  for (const auto& chain : chains) {
    for (const auto& r : post_burn_in(chain, burn_in_fraction)) {
      pooled.push_back(&r);
    }
    summary.iterations = std::max(summary.iterations, static_cast<int>(chain.size()));
  }
  if (pooled.empty()) {
    throw Error{"summarize: no post-burn-in draws"};
  }

  auto freq = std::map<int, std::size_t>{};
  for (const auto* r : pooled) {
    freq[r->k()] += 1;
    for (std::size_t p = 0; p < 4; ++p) {
      per_param[p].push_back(param_value(r->params, p));
    }
  }
  auto best_count = std::size_t{0};
  for (const auto& [k, count] : freq) {
    if (count > best_count) {
      summary.modal_k = k;
      best_count = count;
    }
  }
  summary.modal_k_probability = static_cast<double>(best_count) / static_cast<double>(pooled.size());

  auto mean = std::array<double, 4>{};
  for (std::size_t p = 0; p < 4; ++p) {
    const auto& v = per_param[p];
    for (auto x : v) {
      mean[p] += x;
    }
    mean[p] /= static_cast<double>(v.size());
    summary.credible_intervals[p] = {quantile(v, 0.025), quantile(v, 0.975)};
    if (v.size() >= 4) {
      summary.ess[p] = ess(v);
      summary.mcse[p] = mcse(v);
    }
  }
  summary.posterior_mean = Intensity_params{mean[0], mean[1], mean[2], mean[3]};

  // Posterior mean locations given the modal k, snapped to the grid.
  auto k = static_cast<std::size_t>(summary.modal_k);
  auto sums = std::vector<double>(k, 0.0);
  const Chain_record* best = nullptr;
  for (const auto* r : pooled) {
    if (r->locations.size() != k) {
      continue;
    }
    for (std::size_t j = 0; j < k; ++j) {
      sums[j] += r->locations[j];
    }
    if (best == nullptr || r->log_posterior > best->log_posterior) {
      best = r;
    }
  }
  auto locations = std::vector<double>(k);
  auto valid = true;
  for (std::size_t j = 0; j < k; ++j) {
    auto idx = dist.index_of(sums[j] / static_cast<double>(best_count));
    locations[j] = dist.time_at(idx);
    if (j > 0 && !(locations[j] > locations[j - 1])) {
      valid = false;
    }
  }
  auto counts = valid ? fit_dwelling_counts(trace, locations, summary.posterior_mean) : std::nullopt;
  if (!counts && best != nullptr) {
    locations = best->locations;
    counts = fit_dwelling_counts(trace, locations, summary.posterior_mean);
  }
  if (!counts) {
    throw Error{"summarize: could not fit counts for the modal configuration"};
  }
  summary.change_points = std::move(locations);
  summary.dwelling_counts = std::move(*counts);
  summary.frame_counts = frame_counts(trace, summary.change_points, summary.dwelling_counts);
  summary.predicted_intensity.resize(summary.frame_counts.size());
  for (std::size_t i = 0; i < summary.frame_counts.size(); ++i) {
    summary.predicted_intensity[i] = summary.posterior_mean.frame_mean(summary.frame_counts[i]);
  }
  return summary;
}

auto analyze(const Trace& trace, const Hyperparams& hyper, const Chain_config& config) -> Analysis {
  validate(config);
  auto dist = build_proposal(trace, hyper);
  auto params = initial_params(hyper);
  auto start = initial_state(trace, dist, hyper, params);

  auto chains = std::vector<Chain>{};
  for (auto i = 0; i < config.n_chains; ++i) {
    chains.emplace_back(trace, dist, hyper, start, params, derive_seed(config.seed, static_cast<std::uint64_t>(i)));
  }
  auto run_all = [&](int iterations) {
    parallel_for(config.n_chains, config.threads, [&](int i) { chains[static_cast<std::size_t>(i)].run(iterations); });
  };
  auto samples = [&] {
    auto result = std::vector<Chain_sample>{};
    for (const auto& c : chains) {
      result.push_back(c.sample());
    }
    return result;
  };

  auto total = std::min(config.n_iter, config.max_iter);
  run_all(total);
  auto report = Convergence_report{};
  report.reason = "no iterations";
  if (total > 0) {
    auto current = samples();
    report = check_convergence(current, config);
    while (!report.converged && total < config.max_iter) {
      auto step = std::min(config.extension, config.max_iter - total);
      run_all(step);
      total += step;
      current = samples();
      report = check_convergence(current, config);
    }
  }

  auto result = Analysis{};
  result.chains = samples();
  if (total == 0) {
    throw Error{"analyze: no iterations requested"};
  }
  if (report.converged) {
    auto pair = std::vector<Chain_sample>{result.chains[static_cast<std::size_t>(report.pair.first)],
                                          result.chains[static_cast<std::size_t>(report.pair.second)]};
    result.summary = summarize(trace, dist, pair, config.burn_in_fraction);
  } else {
    result.summary = summarize(trace, dist, result.chains, config.burn_in_fraction);
  }
  result.summary.converged = report.converged;
  result.summary.iterations = total;
  result.summary.convergence = std::move(report);
  return result;
}

}  // namespace crj
