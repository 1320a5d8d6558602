#include <benchmark/benchmark.h>

#include <random>

#include "crj/hyper_estimation.hpp"
#include "crj/model.hpp"
#include "crj/moves.hpp"
#include "crj/proposal.hpp"
#include "crj/sampler.hpp"
#include "crj/simulator.hpp"

namespace {

auto staircase(std::size_t frames, std::uint64_t seed) -> crj::Trace {
  auto rng = crj::Rng{seed};
  auto noise = std::normal_distribution<double>{0.0, 150.0};
  auto y = std::vector<double>(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    auto level = 3 - static_cast<int>(4 * i / frames);
    y[i] = 1000.0 * level + noise(rng);
  }
  return crj::Trace::uniform(std::move(y));
}

void likelihood_framewise(benchmark::State& state) {
  auto trace = staircase(static_cast<std::size_t>(state.range(0)), 1);
  auto L = trace.length();
  auto s = crj::Change_point_state{{L / 4, L / 2, 3 * L / 4}, {3, 2, 1, 0}, {false, false, false}, 0};
  auto params = crj::Intensity_params{1000.0, 0.0, 1000.0, 22500.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(crj::log_likelihood(trace, s, params));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(likelihood_framewise)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void likelihood_dwellings(benchmark::State& state) {
  auto trace = staircase(static_cast<std::size_t>(state.range(0)), 1);
  auto L = trace.length();
  auto locations = std::vector<double>{L / 4, L / 2, 3 * L / 4};
  auto counts = std::vector<int>{3, 2, 1, 0};
  auto params = crj::Intensity_params{1000.0, 0.0, 1000.0, 22500.0};
  for (auto _ : state) {
    auto d = crj::summarize_dwellings(trace, locations);
    benchmark::DoNotOptimize(crj::log_likelihood(*d, counts, params));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(likelihood_dwellings)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void proposal_build(benchmark::State& state) {
  auto trace = staircase(static_cast<std::size_t>(state.range(0)), 2);
  auto hyper = crj::Hyperparams{};
  for (auto _ : state) {
    benchmark::DoNotOptimize(crj::build_proposal(trace, hyper));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(proposal_build)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void move_step(benchmark::State& state) {
  auto trace = staircase(static_cast<std::size_t>(state.range(0)), 3);
  auto hyper = crj::Hyperparams{};
  auto dist = crj::build_proposal(trace, hyper);
  auto table = crj::Move_table{hyper};
  auto params = crj::Intensity_params{1000.0, 0.0, 1000.0, 22500.0};
  auto ctx = crj::Move_context{trace, dist, hyper, table, params};
  auto current = crj::initial_state(trace, dist, hyper, params);
  auto rng = crj::Rng{4};
  for (auto _ : state) {
    auto out = crj::change_point_move(ctx, current, rng);
    if (out.accepted) {
      current = std::move(out.proposed_state);
    }
    benchmark::DoNotOptimize(current);
  }
}
BENCHMARK(move_step)->Arg(100)->Arg(1000)->Arg(10000);

void chain_iterations(benchmark::State& state) {
  auto trace = staircase(400, 5);
  auto hyper = crj::Hyperparams{};
  auto dist = crj::build_proposal(trace, hyper);
  auto params = crj::initial_params(hyper);
  for (auto _ : state) {
    benchmark::DoNotOptimize(crj::run_chain(trace, dist, hyper, params, static_cast<int>(state.range(0)), 6));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(chain_iterations)->Arg(1000)->Unit(benchmark::kMillisecond);

void simulate(benchmark::State& state) {
  auto cfg = crj::Sim_config{};
  cfg.n_fluorophores = static_cast<int>(state.range(0));
  cfg.snr = 0.1;
  auto rng = crj::Rng{7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(crj::simulate_trace(cfg, rng));
  }
}
BENCHMARK(simulate)->DenseRange(1, 4)->Unit(benchmark::kMicrosecond);

void hyper_estimate(benchmark::State& state) {
  auto trace = staircase(static_cast<std::size_t>(state.range(0)), 8);
  auto dist = crj::build_proposal(trace, crj::Hyperparams{});
  for (auto _ : state) {
    benchmark::DoNotOptimize(crj::estimate_trace_hyperparams(trace, dist));
  }
}
BENCHMARK(hyper_estimate)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
