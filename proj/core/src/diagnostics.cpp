#include "crj/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "crj/error.hpp"

namespace crj {

namespace {

auto mean_of(std::span<const double> x) -> double {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

auto variance_of(std::span<const double> x, double mean) -> double {
  auto ss = 0.0;
  for (auto v : x) {
    ss += (v - mean) * (v - mean);
  }
  return ss / static_cast<double>(x.size() - 1);
}

}  // namespace

auto psrf(std::span<const std::vector<double>> sequences) -> double {
  if (sequences.size() < 2) {
    throw Error{"psrf: at least two sequences are required"};
  }
  auto n = sequences.front().size();
  if (n < 2) {
    throw Error{"psrf: sequences need at least two draws"};
  }
  auto means = std::vector<double>{};
  auto w = 0.0;
  for (const auto& s : sequences) {
    if (s.size() != n) {
      throw Error{"psrf: sequences must have equal length"};
    }
    auto m = mean_of(s);
    means.push_back(m);
    w += variance_of(s, m);
  }
  w /= static_cast<double>(sequences.size());
  auto between = variance_of(means, mean_of(means));  // B / n
  if (!(w > 0.0)) {
    return between > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  return std::sqrt((w + between) / w);
}

auto ess(std::span<const double> sequence) -> double {
  auto n = sequence.size();
  if (n < 4) {
    throw Error{"ess: at least four draws are required"};
  }
  auto mean = mean_of(sequence);
  auto autocov = [&](std::size_t lag) {
    auto sum = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) {
      sum += (sequence[i] - mean) * (sequence[i + lag] - mean);
    }
    return sum / static_cast<double>(n);
  };
  auto c0 = autocov(0);
  if (!(c0 > 0.0)) {
    return static_cast<double>(n);
  }
  auto tau = -1.0;
  auto previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    auto gamma = (autocov(2 * k) + autocov(2 * k + 1)) / c0;
    if (!(gamma > 0.0)) {
      break;
    }
    gamma = std::min(gamma, previous);
    previous = gamma;
    tau += 2.0 * gamma;
  }
  auto result = static_cast<double>(n) / std::max(tau, 1e-12);
  return std::min(result, static_cast<double>(n));
}

auto mcse(std::span<const double> sequence) -> double {
  auto sd = std::sqrt(variance_of(sequence, mean_of(sequence)));
  return sd / std::sqrt(ess(sequence));
}

}  // namespace crj
