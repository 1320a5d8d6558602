#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "crj/types.hpp"

namespace crj {

// Frames [begin, end) of one dwelling together with their arithmetic mean and
// sum of squared deviations about that mean.
struct Dwelling_summary {
  std::size_t begin = 0;
  std::size_t end = 0;
  double mean = 0.0;
  double m2 = 0.0;

  auto frames() const -> std::size_t { return end - begin; }
};

// Frame i belongs to dwelling j iff s_j <= times[i] < s_{j+1}. Returns
// nullopt when some dwelling holds no frame.
auto summarize_dwellings(const Trace& trace, std::span<const double> locations)
    -> std::optional<std::vector<Dwelling_summary>>;

// Sum over frames of log N(y_i; mu_f n_i + mu_b, sigma_f2 n_i + sigma_b2),
// evaluated frame by frame.
auto log_likelihood(const Trace& trace, const Change_point_state& state, const Intensity_params& params)
    -> double;

// Same quantity from per-dwelling sufficient statistics, O(k).
auto log_likelihood(std::span<const Dwelling_summary> dwellings, std::span<const int> counts,
                    const Intensity_params& params) -> double;

// Log density of the k interior locations as the even-numbered order
// statistics of 2k + 1 uniforms on (0, length):
//   log (2k+1)! - (2k+1) log length + sum_i log(s_{i+1} - s_i).
// Throws Degenerate_configuration for coincident or unordered locations.
auto log_location_prior(std::span<const double> locations, double length) -> double;

// Best-fit non-negative count for a dwelling mean, ignoring neighbours.
auto nearest_count(double mean, const Intensity_params& params) -> int;

// Sweeps dwellings from last to first; a count equal to its already fixed
// successor is moved by one in whichever direction fits the mean better
// (ties go up, and 0 always goes to 1).
auto fit_counts_from_means(std::span<const double> means, const Intensity_params& params) -> std::vector<int>;

// Returns nullopt for configurations with an empty dwelling; callers treat
// that as an automatic rejection.
auto fit_dwelling_counts(const Trace& trace, std::span<const double> locations, const Intensity_params& params)
    -> std::optional<std::vector<int>>;

// Expands per-dwelling counts to per-frame counts.
auto frame_counts(const Trace& trace, std::span<const double> locations, std::span<const int> counts)
    -> std::vector<int>;

}  // namespace crj
