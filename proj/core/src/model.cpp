#include "crj/model.hpp"

#include <cmath>

#include "crj/error.hpp"

namespace crj {

namespace {

constexpr double k_log_two_pi = 1.8378770664093454836;  // log(2 pi)

auto dwelling_bounds(const Trace& trace, std::span<const double> locations) -> std::vector<std::size_t> {
  auto bounds = std::vector<std::size_t>(locations.size() + 2);
  bounds.front() = 0;
  for (std::size_t j = 0; j < locations.size(); ++j) {
    bounds[j + 1] = trace.first_frame_at_or_after(locations[j]);
  }
  bounds.back() = trace.size();
  return bounds;
}

}  // namespace

auto summarize_dwellings(const Trace& trace, std::span<const double> locations)
    -> std::optional<std::vector<Dwelling_summary>> {
  auto bounds = dwelling_bounds(trace, locations);
  auto y = trace.intensities();
  auto result = std::vector<Dwelling_summary>(locations.size() + 1);
  for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
    auto begin = bounds[j];
    auto end = bounds[j + 1];
    if (end <= begin) {
      return std::nullopt;
    }
    auto sum = 0.0;
    for (auto i = begin; i < end; ++i) {
      sum += y[i];
    }
    auto mean = sum / static_cast<double>(end - begin);
    auto m2 = 0.0;
    for (auto i = begin; i < end; ++i) {
      auto dev = y[i] - mean;
      m2 += dev * dev;
    }
    result[j] = Dwelling_summary{begin, end, mean, m2};
  }
  return result;
}

auto log_likelihood(const Trace& trace, const Change_point_state& state, const Intensity_params& params)
    -> double {
  if (state.counts.size() != state.locations.size() + 1) {
    throw Error{"log_likelihood: counts must have one entry per dwelling"};
  }
  auto bounds = dwelling_bounds(trace, state.locations);
  auto y = trace.intensities();
  auto total = 0.0;
  for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
    auto n = state.counts[j];
    auto mean = params.frame_mean(n);
    auto var = params.frame_variance(n);
    if (!(var > 0.0)) {
      throw Error{"log_likelihood: non-positive frame variance"};
    }
    for (auto i = bounds[j]; i < bounds[j + 1]; ++i) {
      auto dev = y[i] - mean;
      total += -0.5 * (k_log_two_pi + std::log(var)) - dev * dev / (2.0 * var);
    }
  }
  return total;
}

auto log_likelihood(std::span<const Dwelling_summary> dwellings, std::span<const int> counts,
                    const Intensity_params& params) -> double {
  auto total = 0.0;
  for (std::size_t j = 0; j < dwellings.size(); ++j) {
    const auto& d = dwellings[j];
    auto n = counts[j];
    auto var = params.frame_variance(n);
    if (!(var > 0.0)) {
      throw Error{"log_likelihood: non-positive frame variance"};
    }
    auto c = static_cast<double>(d.frames());
    auto offset = d.mean - params.frame_mean(n);
    total += -0.5 * c * (k_log_two_pi + std::log(var)) - (d.m2 + c * offset * offset) / (2.0 * var);
  }
  return total;
}

auto log_location_prior(std::span<const double> locations, double length) -> double {
  auto k = static_cast<double>(locations.size());
  auto total = std::lgamma(2.0 * k + 2.0) - (2.0 * k + 1.0) * std::log(length);
  auto prev = 0.0;
  for (auto s : locations) {
    if (!(s > prev)) {
      throw Degenerate_configuration{"change-point locations must be strictly increasing inside (0, L)"};
    }
    total += std::log(s - prev);
    prev = s;
  }
  if (!(length > prev)) {
    throw Degenerate_configuration{"change-point locations must be strictly increasing inside (0, L)"};
  }
  total += std::log(length - prev);
  return total;
}

auto nearest_count(double mean, const Intensity_params& params) -> int {
  auto x = (mean - params.mu_b) / params.mu_f;
  if (!(x >= 0.5)) {
    return 0;
  }
  auto n = std::floor(x + 0.5);
  return static_cast<int>(n);
}

auto fit_counts_from_means(std::span<const double> means, const Intensity_params& params) -> std::vector<int> {
  auto counts = std::vector<int>(means.size());
  auto residual = [&](double mean, int n) { return std::abs(mean - params.frame_mean(n)); };
  for (auto j = means.size(); j-- > 0;) {
    auto n = nearest_count(means[j], params);
    if (j + 1 < means.size() && n == counts[j + 1]) {
      if (n == 0 || residual(means[j], n + 1) <= residual(means[j], n - 1)) {
        n += 1;
      } else {
        n -= 1;
      }
    }
    counts[j] = n;
  }
  return counts;
}

auto fit_dwelling_counts(const Trace& trace, std::span<const double> locations, const Intensity_params& params)
    -> std::optional<std::vector<int>> {
  auto dwellings = summarize_dwellings(trace, locations);
  if (!dwellings) {
    return std::nullopt;
  }
  auto means = std::vector<double>(dwellings->size());
  for (std::size_t j = 0; j < means.size(); ++j) {
    means[j] = (*dwellings)[j].mean;
  }
  return fit_counts_from_means(means, params);
}

auto frame_counts(const Trace& trace, std::span<const double> locations, std::span<const int> counts)
    -> std::vector<int> {
  auto bounds = dwelling_bounds(trace, locations);
  auto result = std::vector<int>(trace.size());
  for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
    for (auto i = bounds[j]; i < bounds[j + 1]; ++i) {
      result[i] = counts[j];
    }
  }
  return result;
}

}  // namespace crj
