#include "crj/proposal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crj/error.hpp"

namespace crj {

Proposal_distribution::Proposal_distribution(double spacing, double length, std::vector<double> pmf)
    : spacing_{spacing}, length_{length}, pmf_{std::move(pmf)} {
  if (!(spacing_ > 0.0) || !(length_ > 0.0)) {
    throw Error{"proposal: spacing and length must be positive"};
  }
  if (pmf_.empty()) {
    throw Error{"proposal: grid has no interior point"};
  }
  auto total = 0.0;
  for (auto p : pmf_) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw Error{"proposal: every grid point needs positive finite mass"};
    }
    total += p;
  }
  for (auto& p : pmf_) {
    p /= total;
  }
  cdf_.resize(pmf_.size());
  std::partial_sum(pmf_.begin(), pmf_.end(), cdf_.begin());
}

auto Proposal_distribution::grid_size(double spacing, double length) -> std::size_t {
  auto ratio = length / spacing;
  auto points = std::ceil(ratio - 1e-9) - 1.0;
  return points > 0.0 ? static_cast<std::size_t>(points) : 0;
}

auto Proposal_distribution::uniform(double spacing, double length) -> Proposal_distribution {
  auto n = grid_size(spacing, length);
  return Proposal_distribution{spacing, length, std::vector<double>(n, 1.0)};
}

auto Proposal_distribution::index_of(double t) const -> std::size_t {
  if (!(t > 0.0) || !(t < length_)) {
    throw Error{"proposal: location outside (0, L)"};
  }
  auto i = std::llround(t / spacing_) - 1;
  i = std::clamp<long long>(i, 0, static_cast<long long>(pmf_.size()) - 1);
  return static_cast<std::size_t>(i);
}

auto Proposal_distribution::mass_between(std::size_t first, std::size_t last) const -> double {
  if (first > last) {
    return 0.0;
  }
  auto upper = cdf_[last];
  auto lower = first == 0 ? 0.0 : cdf_[first - 1];
  return upper - lower;
}

auto Proposal_distribution::sample(Rng& rng) const -> std::size_t {
  return sample_between(0, pmf_.size() - 1, rng);
}

auto Proposal_distribution::sample_between(std::size_t first, std::size_t last, Rng& rng) const -> std::size_t {
  if (first == last) {
    return first;
  }
  auto lower = first == 0 ? 0.0 : cdf_[first - 1];
  auto target = lower + uniform01(rng) * (cdf_[last] - lower);
  auto begin = cdf_.begin() + static_cast<std::ptrdiff_t>(first);
  auto end = cdf_.begin() + static_cast<std::ptrdiff_t>(last) + 1;
  auto it = std::upper_bound(begin, end, target);
  if (it == end) {
    --it;
  }
  return static_cast<std::size_t>(it - cdf_.begin());
}

auto Proposal_distribution::argmax() const -> std::size_t {
  return static_cast<std::size_t>(std::max_element(pmf_.begin(), pmf_.end()) - pmf_.begin());
}

auto build_proposal(const Trace& trace, int window_size, double base_variance, double resolution)
    -> Proposal_distribution {
  if (window_size < 2) {
    throw Error{"proposal: window size must be at least 2"};
  }
  if (!(base_variance > 0.0)) {
    throw Error{"proposal: base variance must be positive"};
  }
  auto spacing = resolution > 0.0 ? resolution : trace.frame_interval();
  auto grid = Proposal_distribution::grid_size(spacing, trace.length());
  if (grid == 0) {
    throw Error{"proposal: resolution leaves no interior grid point"};
  }

  auto y = trace.intensities();
  auto t = trace.times();
  auto n = y.size();
  auto mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  auto ss = 0.0;
  for (auto v : y) {
    ss += (v - mean) * (v - mean);
  }
  auto sd = std::sqrt(ss / static_cast<double>(n));
  auto snr = sd > 0.0 ? mean / sd : 0.0;

  auto bumps = std::vector<double>(grid, 0.0);
  auto bump_total = 0.0;
  if (std::isfinite(snr) && snr != 0.0) {
    auto z_scale = std::sqrt(std::abs(snr));  // |diff| / sqrt(1 / SNR)
    auto w = static_cast<std::size_t>(window_size);
    auto num_windows = (n + w - 1) / w;
    auto window_mean = [&](std::size_t k) {
      auto begin = k * w;
      auto end = std::min(n, begin + w);
      return std::accumulate(y.begin() + static_cast<std::ptrdiff_t>(begin),
                             y.begin() + static_cast<std::ptrdiff_t>(end), 0.0) /
             static_cast<double>(end - begin);
    };
    auto reach = 8.0 * std::sqrt(base_variance);
    auto prev_mean = window_mean(0);
    for (std::size_t k = 0; k + 1 < num_windows; ++k) {
      auto next_mean = window_mean(k + 1);
      auto z = std::abs(next_mean - prev_mean) * z_scale;
      prev_mean = next_mean;
      if (!(z > 0.0)) {
        continue;
      }
      auto boundary = (k + 1) * w;
      auto centre = 0.5 * (t[boundary - 1] + t[boundary]);
      auto lo = std::max(centre - reach, 0.0);
      auto first = static_cast<std::size_t>(std::max(0.0, std::floor(lo / spacing) - 1.0));
      for (auto g = first; g < grid; ++g) {
        auto tg = static_cast<double>(g + 1) * spacing;
        if (tg > centre + reach) {
          break;
        }
        auto d = tg - centre;
        bumps[g] += z * std::exp(-d * d / (2.0 * base_variance));
      }
    }
    bump_total = std::accumulate(bumps.begin(), bumps.end(), 0.0);
  }

  auto pmf = std::vector<double>(grid, 1.0 / static_cast<double>(grid));
  if (bump_total > 0.0 && std::isfinite(bump_total)) {
    for (std::size_t g = 0; g < grid; ++g) {
      pmf[g] = k_uniform_floor_share / static_cast<double>(grid) +
               (1.0 - k_uniform_floor_share) * bumps[g] / bump_total;
    }
  }
  return Proposal_distribution{spacing, trace.length(), std::move(pmf)};
}

auto build_proposal(const Trace& trace, const Hyperparams& hyper) -> Proposal_distribution {
  return build_proposal(trace, hyper.window_size, hyper.base_variance, hyper.resolution);
}

auto sample_location(const Proposal_distribution& dist, Rng& rng) -> double {
  return dist.time_at(dist.sample(rng));
}

auto pmf_at(const Proposal_distribution& dist, double t) -> double {
  return dist.mass(dist.index_of(t));
}

}  // namespace crj
