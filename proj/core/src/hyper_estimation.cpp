#include "crj/hyper_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "crj/error.hpp"

namespace crj {

namespace {

// Candidates whose step statistic stays below this are treated as noise.
constexpr double k_min_step_statistic = 4.0;

// Steps missed by the pmf peaks are added back only above this statistic.
constexpr double k_split_statistic = 6.0;

// Fewer frames before the final section than this give a low-confidence step.
constexpr std::size_t k_min_signal_frames = 2;

// Density modes below this share of the highest mode are ignored unless they
// hold at least k_min_mode_frames frames.
constexpr double k_prominence = 0.2;
constexpr double k_min_mode_frames = 3.0;

class Prefix_sums {
 public:
  explicit Prefix_sums(std::span<const double> y) : sums_(y.size() + 1, 0.0) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      sums_[i + 1] = sums_[i] + y[i];
    }
  }

  auto mean(std::size_t begin, std::size_t end) const -> double {
    return (sums_[end] - sums_[begin]) / static_cast<double>(end - begin);
  }

 private:
  std::vector<double> sums_;
};

auto sample_variance(std::span<const double> y) -> double {
  if (y.size() < 2) {
    return 0.0;
  }
  auto mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  auto ss = 0.0;
  for (auto v : y) {
    ss += (v - mean) * (v - mean);
  }
  return ss / static_cast<double>(y.size() - 1);
}

auto median(std::vector<double> v) -> double {
  if (v.empty()) {
    return 0.0;
  }
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) {
    return *mid;
  }
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

// Squared normal-consistent MAD; one partially covered frame at the start of
// the final section would otherwise dominate its variance.
auto robust_variance(std::span<const double> y) -> double {
  if (y.size() < 2) {
    return 0.0;
  }
  auto centre = median(std::vector<double>(y.begin(), y.end()));
  auto deviations = std::vector<double>(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    deviations[i] = std::abs(y[i] - centre);
  }
  auto sd = 1.482602218505602 * median(std::move(deviations));
  return sd * sd;
}

// Section means for boundaries b_1 < ... < b_m (frame indices); section j
// spans [b_j, b_{j+1}) with b_0 = 0 and b_{m+1} = N.
struct Sections {
  const Prefix_sums& sums;
  std::size_t n;
  std::vector<std::size_t> bounds;

  auto lo(std::size_t i) const -> std::size_t { return i == 0 ? 0 : bounds[i - 1]; }
  auto hi(std::size_t i) const -> std::size_t { return i + 1 == bounds.size() ? n : bounds[i + 1]; }

  auto difference(std::size_t i) const -> double {
    return std::abs(sums.mean(bounds[i], hi(i)) - sums.mean(lo(i), bounds[i]));
  }

  // Median step between neighbouring sections, leaving out the frames next
  // to a boundary (a transition may cover them only partly) in sections long
  // enough to spare them.
  auto trimmed_median_difference(std::span<const double> y, std::size_t i) const -> double {
    auto level = [&](std::size_t begin, std::size_t end) {
      if (end - begin > 3) {
        begin += begin > 0 ? 1 : 0;
        end -= end < n ? 1 : 0;
      }
      return median(std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(begin),
                                        y.begin() + static_cast<std::ptrdiff_t>(end)));
    };
    return std::abs(level(bounds[i], hi(i)) - level(lo(i), bounds[i]));
  }

  // Inverse variance factor of a section-mean difference, 1 / (1/nl + 1/nr).
  auto precision(std::size_t i) const -> double {
    auto nl = static_cast<double>(bounds[i] - lo(i));
    auto nr = static_cast<double>(hi(i) - bounds[i]);
    return nl * nr / (nl + nr);
  }

  // Difference of section medians; short excursions inside a section (blinks,
  // partially covered frames) do not drag it below the floor.
  auto median_difference(std::span<const double> y, std::size_t i) const -> double {
    auto level = [&](std::size_t begin, std::size_t end) {
      return median(std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(begin),
                                        y.begin() + static_cast<std::ptrdiff_t>(end)));
    };
    return std::abs(level(bounds[i], hi(i)) - level(lo(i), bounds[i]));
  }

  auto statistic(std::size_t i, double sigma) const -> double {
    auto d = difference(i);
    if (!(sigma > 0.0)) {
      return d > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    auto nl = static_cast<double>(bounds[i] - lo(i));
    auto nr = static_cast<double>(hi(i) - bounds[i]);
    return d / (sigma * std::sqrt(1.0 / nl + 1.0 / nr));
  }

  // Repeatedly drops the boundary with the smallest score while it is below
  // the threshold.
  template <typename Score>
  void prune(Score score, double threshold) {
    while (!bounds.empty()) {
      auto best = std::size_t{0};
      auto best_score = score(0);
      for (std::size_t i = 1; i < bounds.size(); ++i) {
        auto s = score(i);
        if (s < best_score) {
          best = i;
          best_score = s;
        }
      }
      if (!(best_score < threshold)) {
        return;
      }
      bounds.erase(bounds.begin() + static_cast<std::ptrdiff_t>(best));
    }
  }

  // Inserts the best split of any section whose step statistic reaches
  // `threshold` and whose mean difference reaches `floor`, until none is left.
  void split(double sigma, double threshold, double floor) {
    for (auto added = true; added;) {
      added = false;
      auto sections = bounds.size() + 1;
      for (std::size_t s = 0; s < sections && !added; ++s) {
        auto left = s == 0 ? std::size_t{0} : bounds[s - 1];
        auto right = s == bounds.size() ? n : bounds[s];
        auto best = std::size_t{0};
        auto best_stat = 0.0;
        for (auto b = left + 1; b < right; ++b) {
          auto nl = static_cast<double>(b - left);
          auto nr = static_cast<double>(right - b);
          auto d = std::abs(sums.mean(b, right) - sums.mean(left, b));
          auto stat = sigma > 0.0 ? d / (sigma * std::sqrt(1.0 / nl + 1.0 / nr))
                                  : (d > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
          if (d >= floor && stat > best_stat) {
            best = b;
            best_stat = stat;
          }
        }
        if (best_stat >= threshold) {
          bounds.insert(std::upper_bound(bounds.begin(), bounds.end(), best), best);
          added = true;
        }
      }
    }
  }

  // Moves each boundary within `reach` frames to the position maximizing the
  // two-sample step statistic between its neighbours.
  void refine(std::size_t reach) {
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      auto left = lo(i);
      auto right = hi(i);
      auto first = std::max(left + 1, bounds[i] > reach ? bounds[i] - reach : 0);
      auto last = std::min(right - 1, bounds[i] + reach);
      auto best = bounds[i];
      auto best_value = -1.0;
      for (auto b = first; b <= last; ++b) {
        auto nl = static_cast<double>(b - left);
        auto nr = static_cast<double>(right - b);
        auto value = std::abs(sums.mean(b, right) - sums.mean(left, b)) * std::sqrt(nl * nr / (nl + nr));
        if (value > best_value) {
          best = b;
          best_value = value;
        }
      }
      bounds[i] = best;
    }
  }

  // A one-frame section whose mean lies strictly between its neighbours is a
  // frame only partly covered by a transition. Drops whichever of its two
  // boundaries leaves the larger step.
  void merge_transition_frames() {
    for (std::size_t i = 0; i + 1 < bounds.size();) {
      if (bounds[i + 1] - bounds[i] != 1) {
        ++i;
        continue;
      }
      auto left = sums.mean(lo(i), bounds[i]);
      auto mid = sums.mean(bounds[i], bounds[i + 1]);
      auto right = sums.mean(bounds[i + 1], hi(i + 1));
      if (!((left - mid) * (mid - right) > 0.0)) {
        ++i;
        continue;
      }
      auto keep_first = std::abs(sums.mean(bounds[i], hi(i + 1)) - left);
      auto keep_second = std::abs(right - sums.mean(lo(i), bounds[i + 1]));
      bounds.erase(bounds.begin() + static_cast<std::ptrdiff_t>(keep_first >= keep_second ? i + 1 : i));
    }
  }
};

}  // namespace

auto proposal_peaks(const Proposal_distribution& dist) -> std::vector<std::size_t> {
  auto pmf = dist.pmf();
  auto peaks = std::vector<std::size_t>{};
  if (pmf.size() < 2) {
    return peaks;
  }
  for (std::size_t g = 0; g < pmf.size(); ++g) {
    auto rises = g == 0 ? pmf[0] > pmf[1] : pmf[g] > pmf[g - 1];
    auto holds = g + 1 == pmf.size() || pmf[g] >= pmf[g + 1];
    if (rises && holds) {
      peaks.push_back(g);
    }
  }
  return peaks;
}

auto mode_intensity(std::span<const double> values, double bandwidth, double min_value) -> double {
  if (values.empty()) {
    throw Error{"mode_intensity: no values"};
  }
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  auto lo = *lo_it;
  auto hi = *hi_it;
  if (!(hi > lo) || !(bandwidth > 0.0)) {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  }
  // Gaussian kernel density on a grid of bandwidth / 4.
  auto step = 0.25 * bandwidth;
  auto points = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
  auto density = std::vector<double>(points, 0.0);
  for (auto v : values) {
    auto centre = (v - lo) / step;
    auto first = static_cast<std::size_t>(std::max(0.0, std::floor(centre - 16.0)));
    auto last = std::min(points - 1, static_cast<std::size_t>(std::ceil(centre + 16.0)));
    for (auto g = first; g <= last; ++g) {
      auto z = (static_cast<double>(g) - centre) * 0.25;
      density[g] += std::exp(-0.5 * z * z);
    }
  }
  auto at = [&](std::size_t g) { return lo + static_cast<double>(g) * step; };
  // Height of a tight cluster of frames seen through the kernel, with the
  // frames themselves spread by noise of about one bandwidth.
  auto cluster_height = k_min_mode_frames / std::sqrt(2.0);
  auto peak_height = 0.0;
  auto global = std::size_t{0};
  for (std::size_t g = 0; g < points; ++g) {
    if (density[g] > peak_height) {
      peak_height = density[g];
      global = g;
    }
  }
  for (std::size_t g = 0; g < points; ++g) {
    auto left = g == 0 ? -1.0 : density[g - 1];
    auto right = g + 1 == points ? -1.0 : density[g + 1];
    if (density[g] > left && density[g] >= right && at(g) > min_value &&
        density[g] >= std::min(k_prominence * peak_height, cluster_height)) {
      return at(g);
    }
  }
  return at(global);
}

auto noise_scale(std::span<const double> intensities) -> double {
  if (intensities.size() < 2) {
    return 0.0;
  }
  auto diffs = std::vector<double>(intensities.size() - 1);
  for (std::size_t i = 1; i < intensities.size(); ++i) {
    diffs[i - 1] = std::abs(intensities[i] - intensities[i - 1]);
  }
  // median |N(0, 2 s^2)| = 0.6745 sqrt(2) s
  return median(std::move(diffs)) / (0.6744897501960817 * std::sqrt(2.0));
}

auto pooling_weight(const Trace& trace, int window_size, Pool_weighting weighting) -> double {
  auto y = trace.intensities();
  if (weighting == Pool_weighting::homogeneous) {
    auto n = static_cast<double>(y.size());
    auto var = sample_variance(y) * (n - 1.0) / n;
    return var > 0.0 ? 1.0 / var : 0.0;
  }
  auto w = static_cast<std::size_t>(std::max(window_size, 2));
  auto total = 0.0;
  auto windows = 0;
  for (std::size_t begin = 0; begin + 1 < y.size(); begin += w) {
    auto end = std::min(y.size(), begin + w);
    total += sample_variance(y.subspan(begin, end - begin));
    windows += 1;
  }
  auto max_intensity = std::abs(*std::max_element(y.begin(), y.end()));
  auto measure = total / windows * max_intensity * static_cast<double>(y.size());
  return measure > 0.0 ? 1.0 / measure : 0.0;
}

auto estimate_trace_hyperparams(const Trace& trace, const Proposal_distribution& dist,
                                std::optional<double> intensity_floor, Pool_weighting weighting,
                                int window_size) -> Trace_hyper_estimate {
  auto y = trace.intensities();
  auto n = y.size();
  auto sums = Prefix_sums{y};
  auto sigma = noise_scale(y);

  auto sections = Sections{sums, n, {}};
  for (auto g : proposal_peaks(dist)) {
    auto b = trace.first_frame_at_or_after(dist.time_at(g));
    if (b > 0 && b < n && (sections.bounds.empty() || b > sections.bounds.back())) {
      sections.bounds.push_back(b);
    }
  }
  auto window = static_cast<std::size_t>(std::max(window_size, 1));
  sections.prune([&](std::size_t i) { return sections.statistic(i, sigma); }, k_min_step_statistic);
  sections.refine(window);
  sections.split(sigma, k_split_statistic, 0.0);
  sections.refine(window);

  auto final_begin = sections.bounds.empty() ? std::size_t{0} : sections.bounds.back();
  auto background = sums.mean(final_begin, n);

  auto floor = 0.0;
  if (intensity_floor) {
    floor = *intensity_floor;
  } else if (final_begin > 0) {
    auto above = std::vector<double>(final_begin);
    for (std::size_t i = 0; i < final_begin; ++i) {
      above[i] = y[i] - background;
    }
    auto [lo, hi] = std::minmax_element(above.begin(), above.end());
    auto bandwidth = std::max(sigma, (*hi - *lo) / 200.0);
    floor = k_floor_multiplier * mode_intensity(above, bandwidth, k_min_step_statistic * sigma);
  }

  if (floor > 0.0) {
    sections.prune([&](std::size_t i) { return sections.median_difference(y, i); }, floor);
    sections.refine(window);
    sections.split(sigma, k_split_statistic, floor);
    sections.refine(window);
    sections.merge_transition_frames();
  } else {
    sections.bounds.clear();
  }

  auto est = Trace_hyper_estimate{};
  est.intensity_floor = floor;
  final_begin = sections.bounds.empty() ? std::size_t{0} : sections.bounds.back();
  est.eta_b = sums.mean(final_begin, n);
  auto final_var = robust_variance(y.subspan(final_begin));
  est.alpha_b = final_var > 0.0 ? final_var : std::max(sigma * sigma, 1.0);
  est.beta_b = est.alpha_b * (est.alpha_b + 1.0);

  if (!sections.bounds.empty()) {
    auto total = 0.0;
    auto weights = 0.0;
    for (std::size_t i = 0; i < sections.bounds.size(); ++i) {
      auto w = sections.precision(i);
      total += w * sections.trimmed_median_difference(y, i);
      weights += w;
      auto b = sections.bounds[i];
      est.change_points.push_back(0.5 * (trace.times()[b - 1] + trace.times()[b]));
    }
    est.eta_f = total / weights;
    // A single frame of signal cannot tell a partly covered frame from a
    // full one.
    est.low_confidence = final_begin < k_min_signal_frames;
  } else {
    est.low_confidence = true;
    auto peak = *std::max_element(y.begin(), y.end()) - est.eta_b;
    est.eta_f = floor > 0.0 ? floor : (peak > 0.0 ? k_floor_multiplier * peak : 1.0);
  }
  est.alpha_f = est.eta_f;
  est.beta_f = est.eta_f * (est.alpha_f + 1.0);
  est.weight = pooling_weight(trace, static_cast<int>(window), weighting);
  return est;
}

auto pool_hyperparams(std::span<const Trace_hyper_estimate> estimates, double scaling_f, double scaling_b,
                      const Hyperparams& base) -> Hyperparams {
  if (estimates.empty()) {
    throw Error{"pool_hyperparams: no estimates"};
  }
  auto any_confident =
      std::any_of(estimates.begin(), estimates.end(), [](const auto& e) { return !e.low_confidence; });
  auto total = 0.0;
  auto hyper = base;
  hyper.eta_f = hyper.eta_b = hyper.alpha_f = hyper.beta_f = hyper.alpha_b = hyper.beta_b = 0.0;
  for (const auto& e : estimates) {
    if (any_confident && e.low_confidence) {
      continue;
    }
    total += e.weight;
    hyper.eta_f += e.weight * e.eta_f;
    hyper.eta_b += e.weight * e.eta_b;
    hyper.alpha_f += e.weight * e.alpha_f;
    hyper.beta_f += e.weight * e.beta_f;
    hyper.alpha_b += e.weight * e.alpha_b;
    hyper.beta_b += e.weight * e.beta_b;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw Error{"pool_hyperparams: total weight must be positive and finite"};
  }
  for (auto* field : {&hyper.eta_f, &hyper.eta_b, &hyper.alpha_f, &hyper.beta_f, &hyper.alpha_b, &hyper.beta_b}) {
    *field /= total;
  }
  hyper.scaling_f = scaling_f;
  hyper.scaling_b = scaling_b;
  hyper.nu_f = scaling_f * std::abs(hyper.eta_f);
  hyper.nu_b = std::max(scaling_b * std::abs(hyper.eta_b), k_min_nu_b);
  hyper.mu_f_step = std::max(hyper.proposal_scale_f * std::abs(hyper.eta_f), std::sqrt(hyper.nu_f));
  hyper.mu_b_step = std::max(hyper.proposal_scale_b * std::abs(hyper.eta_b), std::sqrt(hyper.nu_b));
  return hyper;
}

auto pool_hyperparams(std::span<const Trace_hyper_estimate> estimates, const Hyperparams& base) -> Hyperparams {
  return pool_hyperparams(estimates, base.scaling_f, base.scaling_b, base);
}

}  // namespace crj
