#include <gtest/gtest.h>

#include <cmath>

#include "crj/error.hpp"
#include "crj/hyper_estimation.hpp"
#include "crj/metrics.hpp"
#include "crj/sampler.hpp"
#include "crj/simulator.hpp"
#include "oracles.hpp"

namespace crj {
namespace {

auto clean_two_step() -> Trace {
  auto counts = std::vector<int>{};
  for (auto i = 0; i < 30; ++i) {
    counts.push_back(i < 10 ? 2 : i < 20 ? 1 : 0);
  }
  return test::step_trace(counts, 1000.0);
}

auto clean_hyper() -> Hyperparams {
  auto hyper = Hyperparams{};
  hyper.eta_f = 1000.0;
  hyper.nu_f = 5.0;
  hyper.alpha_f = 1000.0;
  hyper.beta_f = 1000.0 * 1001.0;
  hyper.alpha_b = 10.0;
  hyper.beta_b = 110.0;
  return hyper;
}

auto small_config(std::uint64_t seed) -> Chain_config {
  auto config = Chain_config{};
  config.n_iter = 2000;
  config.extension = 1000;
  config.max_iter = 6000;
  config.seed = seed;
  return config;
}

TEST(ChainConfig, Validation) {
  EXPECT_NO_THROW(validate(Chain_config{}));
  auto c = Chain_config{};
  c.n_chains = 1;
  EXPECT_THROW(validate(c), Error);
  c = Chain_config{};
  c.burn_in_fraction = 1.0;
  EXPECT_THROW(validate(c), Error);
  c = Chain_config{};
  c.psrf_threshold = 0.9;
  EXPECT_THROW(validate(c), Error);
}

TEST(BurnIn, FloorOfFraction) {
  EXPECT_EQ(burn_in_count(10, 0.5), 5u);
  EXPECT_EQ(burn_in_count(11, 0.5), 5u);
  EXPECT_EQ(burn_in_count(3, 0.1), 0u);
}

TEST(ModalK, TiesGoToSmaller) {
  auto records = std::vector<Chain_record>(4);
  records[0].locations = {1.0};
  records[1].locations = {1.0};
  records[2].locations = {1.0, 2.0};
  records[3].locations = {1.0, 2.0};
  EXPECT_EQ(modal_k(records), 1);
  records.push_back(records[3]);
  EXPECT_EQ(modal_k(records), 2);
}

TEST(Chain, ZeroIterationsLeaveEmptySample) {
  auto trace = clean_two_step();
  auto hyper = clean_hyper();
  auto dist = build_proposal(trace, hyper);
  auto sample = run_chain(trace, dist, hyper, initial_params(hyper), 0, 1);
  EXPECT_TRUE(sample.empty());
}

TEST(Chain, ResumingEqualsOneRun) {
  auto trace = clean_two_step();
  auto hyper = clean_hyper();
  auto dist = build_proposal(trace, hyper);
  auto params = initial_params(hyper);
  auto whole = Chain{trace, dist, hyper, initial_state(trace, dist, hyper, params), params, 3};
  whole.run(300);
  auto parts = Chain{trace, dist, hyper, initial_state(trace, dist, hyper, params), params, 3};
  parts.run(100);
  parts.run(200);
  ASSERT_EQ(whole.sample().size(), parts.sample().size());
  for (std::size_t i = 0; i < whole.sample().size(); ++i) {
    EXPECT_EQ(whole.sample()[i].locations, parts.sample()[i].locations);
    EXPECT_EQ(whole.sample()[i].params, parts.sample()[i].params);
  }
}

TEST(Chain, RecordsAreConsistent) {
  auto trace = clean_two_step();
  auto hyper = clean_hyper();
  auto dist = build_proposal(trace, hyper);
  auto table = Move_table{hyper};
  auto sample = run_chain(trace, dist, hyper, initial_params(hyper), 500, 4);
  for (const auto& r : sample) {
    ASSERT_EQ(r.counts.size(), r.locations.size() + 1);
    auto state = Change_point_state{r.locations, r.counts, {}, r.short_count};
    state.short_flags = classify_short_pairs(state, hyper).flags;
    EXPECT_NEAR(r.log_posterior, log_posterior(trace, dist, table, hyper, state, r.params),
                1e-8 * std::abs(r.log_posterior));
  }
}

TEST(Chain, NoiseFreeTwoStepMass) {
  auto trace = clean_two_step();
  auto hyper = clean_hyper();
  auto dist = build_proposal(trace, hyper);
  auto sample = run_chain(trace, dist, hyper, initial_params(hyper), 4000, 5);
  auto hits = 0;
  auto kept = 0;
  for (std::size_t i = burn_in_count(sample.size(), 0.5); i < sample.size(); ++i) {
    ++kept;
    hits += sample[i].locations == std::vector<double>{200.0, 400.0};
  }
  EXPECT_GT(hits, 0.9 * kept);
}

TEST(Convergence, IdenticalChainsConverge) {
  auto trace = clean_two_step();
  auto hyper = clean_hyper();
  auto dist = build_proposal(trace, hyper);
  auto a = run_chain(trace, dist, hyper, initial_params(hyper), 2000, 6);
  auto r = check_pair(a, a, Chain_config{});
  EXPECT_TRUE(r.converged) << r.reason;
  EXPECT_EQ(r.psrf_k, 1.0);
  for (auto p : r.psrf_params) {
    EXPECT_EQ(p, 1.0);
  }
}

TEST(Convergence, DisagreeingModalKRefused) {
  auto make = [](int k, double jitter) {
    auto s = Chain_sample(100);
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (auto j = 0; j < k; ++j) {
        s[i].locations.push_back(100.0 * (j + 1));
      }
      s[i].params = {1000.0 + jitter * (i % 7), 0.0, 1000.0, 10.0};
    }
    return s;
  };
  auto r = check_pair(make(2, 1.0), make(3, 1.0), Chain_config{});
  EXPECT_FALSE(r.converged);
}

TEST(Analyze, CleanTraceConvergesToTruth) {
  auto trace = clean_two_step();
  auto result = analyze(trace, clean_hyper(), small_config(7));
  EXPECT_TRUE(result.summary.converged) << result.summary.convergence.reason;
  EXPECT_EQ(result.summary.modal_k, 2);
  EXPECT_EQ(result.summary.change_points, (std::vector<double>{200.0, 400.0}));
  EXPECT_EQ(result.summary.dwelling_counts, (std::vector<int>{2, 1, 0}));
  EXPECT_EQ(result.summary.frame_counts.size(), trace.size());
}

TEST(Analyze, SimulatedSingleFluorophoreAccuracy) {
  auto cfg = Sim_config{};
  cfg.snr = 1.0;
  auto rng = Rng{8};
  auto sim = simulate_trace(cfg, rng);
  auto est = estimate_trace_hyperparams(sim.trace, build_proposal(sim.trace, Hyperparams{}));
  auto single = std::vector{est};
  auto hyper = pool_hyperparams(single, Hyperparams{});
  auto config = Chain_config{};
  config.seed = 9;
  auto result = analyze(sim.trace, hyper, config);
  auto r = framewise_report(sim.truth.counts, result.summary.frame_counts);
  EXPECT_TRUE(result.summary.converged);
  EXPECT_GE(r.accuracy, 0.99);
}

TEST(Analyze, BackgroundOnlyGivesZeroCounts) {
  auto trace = test::step_trace(std::vector<int>(60, 0), 1000.0);
  auto result = analyze(trace, clean_hyper(), small_config(10));
  for (auto c : result.summary.frame_counts) {
    EXPECT_EQ(c, 0);
  }
}

TEST(Analyze, ThreadCountDoesNotChangeResult) {
  auto trace = clean_two_step();
  auto one = small_config(11);
  one.threads = 1;
  auto many = small_config(11);
  many.threads = 3;
  auto a = analyze(trace, clean_hyper(), one);
  auto b = analyze(trace, clean_hyper(), many);
  ASSERT_EQ(a.chains.size(), b.chains.size());
  for (std::size_t c = 0; c < a.chains.size(); ++c) {
    ASSERT_EQ(a.chains[c].size(), b.chains[c].size());
    for (std::size_t i = 0; i < a.chains[c].size(); ++i) {
      ASSERT_EQ(a.chains[c][i].locations, b.chains[c][i].locations);
      ASSERT_EQ(a.chains[c][i].params, b.chains[c][i].params);
    }
  }
  EXPECT_EQ(a.summary.frame_counts, b.summary.frame_counts);
}

TEST(Analyze, ZeroIterationsThrows) {
  auto config = small_config(12);
  config.n_iter = 0;
  EXPECT_THROW(analyze(clean_two_step(), clean_hyper(), config), Error);
}

}  // namespace
}  // namespace crj
