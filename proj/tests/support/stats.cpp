#include "stats.hpp"

#include <algorithm>
#include <cmath>

namespace crj::test {

auto kolmogorov_tail(double x) -> double {
  if (x <= 0.0) {
    return 1.0;
  }
  if (x < 0.2) {
    return 1.0;
  }
  auto sum = 0.0;
  for (auto j = 1; j <= 200; ++j) {
    auto term = std::exp(-2.0 * j * j * x * x);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-17) {
      break;
    }
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

auto ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) -> Ks_result {
  std::sort(samples.begin(), samples.end());
  auto n = static_cast<double>(samples.size());
  auto d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto f = cdf(samples[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  auto rn = std::sqrt(n);
  return {d, kolmogorov_tail((rn + 0.12 + 0.11 / rn) * d)};
}

auto within_binomial(std::size_t count, std::size_t n, double p, double z) -> bool {
  auto expected = static_cast<double>(n) * p;
  auto sd = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
  return std::abs(static_cast<double>(count) - expected) <= z * sd;
}

auto mean(const std::vector<double>& x) -> double {
  auto s = 0.0;
  for (auto v : x) {
    s += v;
  }
  return s / static_cast<double>(x.size());
}

auto sample_variance(const std::vector<double>& x) -> double {
  auto m = mean(x);
  auto s = 0.0;
  for (auto v : x) {
    s += (v - m) * (v - m);
  }
  return s / static_cast<double>(x.size() - 1);
}

auto thin(const std::vector<double>& x, std::size_t first, std::size_t step) -> std::vector<double> {
  auto out = std::vector<double>{};
  for (auto i = first; i < x.size(); i += step) {
    out.push_back(x[i]);
  }
  return out;
}

}  // namespace crj::test
