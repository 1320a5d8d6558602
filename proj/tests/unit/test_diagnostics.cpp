#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "crj/diagnostics.hpp"
#include "crj/error.hpp"
#include "crj/rng.hpp"
#include "stats.hpp"

namespace crj {
namespace {

TEST(Psrf, HandComputedExample) {
  // Means 2 and 3, within variances 1, variance of means 0.5.
  auto chains = std::vector<std::vector<double>>{{1.0, 2.0, 3.0}, {2.0, 3.0, 4.0}};
  EXPECT_NEAR(psrf(chains), std::sqrt(1.5), 1e-14);
}

TEST(Psrf, IdenticalChainsGiveOne) {
  auto rng = Rng{1};
  auto noise = std::normal_distribution<double>{};
  auto a = std::vector<double>(500);
  for (auto& v : a) {
    v = noise(rng);
  }
  auto chains = std::vector<std::vector<double>>{a, a, a};
  EXPECT_EQ(psrf(chains), 1.0);
}

TEST(Psrf, ConstantChains) {
  auto same = std::vector<std::vector<double>>{std::vector<double>(10, 3.0), std::vector<double>(10, 3.0)};
  EXPECT_EQ(psrf(same), 1.0);
  auto apart = std::vector<std::vector<double>>{std::vector<double>(10, 0.0), std::vector<double>(10, 10.0)};
  EXPECT_GT(psrf(apart), 1.2);
}

TEST(Psrf, TextbookRelation) {
  // With the (n - 1) / n factor on W, the textbook statistic R satisfies
  // R^2 = psrf^2 - 1 / n.
  auto rng = Rng{2};
  auto chains = std::vector<std::vector<double>>(4, std::vector<double>(200));
  for (std::size_t j = 0; j < chains.size(); ++j) {
    auto noise = std::normal_distribution<double>{0.1 * static_cast<double>(j), 1.0};
    for (auto& v : chains[j]) {
      v = noise(rng);
    }
  }
  auto n = 200.0;
  auto means = std::vector<double>{};
  auto w = 0.0;
  for (const auto& c : chains) {
    means.push_back(test::mean(c));
    w += test::sample_variance(c);
  }
  w /= 4.0;
  auto b = n * test::sample_variance(means);
  auto textbook = std::sqrt(((n - 1.0) / n * w + b / n) / w);
  auto r = psrf(chains);
  EXPECT_NEAR(textbook * textbook, r * r - 1.0 / n, 1e-12);
}

TEST(Psrf, Errors) {
  auto one = std::vector<std::vector<double>>{{1.0, 2.0}};
  EXPECT_THROW(psrf(one), Error);
  auto ragged = std::vector<std::vector<double>>{{1.0, 2.0}, {1.0, 2.0, 3.0}};
  EXPECT_THROW(psrf(ragged), Error);
}

TEST(Ess, IidNearSampleSize) {
  auto rng = Rng{3};
  auto noise = std::normal_distribution<double>{};
  auto x = std::vector<double>(10000);
  for (auto& v : x) {
    v = noise(rng);
  }
  auto e = ess(x);
  EXPECT_GT(e, 8000.0);
  EXPECT_LE(e, 10000.0);
}

TEST(Ess, Ar1MatchesIntegratedAutocorrelation) {
  auto rng = Rng{4};
  auto noise = std::normal_distribution<double>{};
  const auto rho = 0.5;
  auto x = std::vector<double>(100000);
  auto v = 0.0;
  for (auto& xi : x) {
    v = rho * v + noise(rng);
    xi = v;
  }
  auto want = static_cast<double>(x.size()) * (1.0 - rho) / (1.0 + rho);
  EXPECT_NEAR(ess(x) / want, 1.0, 0.15);
}

TEST(Ess, ConstantSequenceAndErrors) {
  auto x = std::vector<double>(50, 2.0);
  EXPECT_EQ(ess(x), 50.0);
  auto tiny = std::vector<double>{1.0, 2.0, 3.0};
  EXPECT_THROW(ess(tiny), Error);
}

TEST(Mcse, SdOverRootEss) {
  auto rng = Rng{5};
  auto noise = std::normal_distribution<double>{0.0, 2.0};
  auto x = std::vector<double>(4000);
  for (auto& v : x) {
    v = noise(rng);
  }
  EXPECT_NEAR(mcse(x), std::sqrt(test::sample_variance(x)) / std::sqrt(ess(x)), 1e-12);
}

}  // namespace
}  // namespace crj
