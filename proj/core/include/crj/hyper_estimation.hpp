#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "crj/proposal.hpp"
#include "crj/types.hpp"

namespace crj {

enum class Pool_weighting {
  homogeneous,   // 1 / trace variance
  heterogeneous, // 1 / (mean window variance * max intensity * frame count)
};

inline constexpr double k_floor_multiplier = 0.9;

struct Trace_hyper_estimate {
  double eta_f = 0.0;
  double eta_b = 0.0;
  double alpha_f = 0.0;
  double beta_f = 0.0;
  double alpha_b = 0.0;
  double beta_b = 0.0;
  double weight = 0.0;
  // No candidate survived the intensity floor (eta_f is then the floor-based
  // fallback), or the signal spans a single frame. Such estimates are left
  // out of pools with confident members.
  bool low_confidence = false;
  double intensity_floor = 0.0;
  std::vector<double> change_points;  // surviving candidates
};

// Grid indices of the local maxima of the proposal pmf (strict rise on the
// left, no rise on the right, so plateaus yield their first point).
auto proposal_peaks(const Proposal_distribution& dist) -> std::vector<std::size_t>;

// Lowest prominent mode of a Gaussian kernel density estimate of the values:
// the first local maximum above min_value whose height is at least a fifth of
// the highest one or that of three coincident values. Falls back to the
// highest mode.
auto mode_intensity(std::span<const double> values, double bandwidth, double min_value) -> double;

// Robust per-frame noise standard deviation from successive differences.
auto noise_scale(std::span<const double> intensities) -> double;

// Candidates are the pmf peaks. Candidates that do not separate
// statistically different sections are dropped, the rest are snapped to the
// frame boundary within window_size frames with the largest local step
// statistic, and then the candidate with the smallest section-mean difference
// is removed repeatedly while that difference is below the intensity floor.
// Single-frame sections at an intermediate level (partly covered transition
// frames) are merged into a neighbour. With no floor given, the floor is 0.9
// times the lowest prominent mode of the background-corrected intensities of
// the frames before the final section.
auto estimate_trace_hyperparams(const Trace& trace, const Proposal_distribution& dist,
                                std::optional<double> intensity_floor = std::nullopt,
                                Pool_weighting weighting = Pool_weighting::homogeneous, int window_size = 10)
    -> Trace_hyper_estimate;

auto pooling_weight(const Trace& trace, int window_size, Pool_weighting weighting) -> double;

// Weighted averages of the estimates written into a copy of `base`; nu_f,
// nu_b and the mean proposal steps are derived from the pooled etas.
// Low-confidence estimates are ignored when at least one confident estimate
// is present. Throws when the total weight is not positive.
auto pool_hyperparams(std::span<const Trace_hyper_estimate> estimates, double scaling_f, double scaling_b,
                      const Hyperparams& base = {}) -> Hyperparams;

auto pool_hyperparams(std::span<const Trace_hyper_estimate> estimates, const Hyperparams& base) -> Hyperparams;

// Smallest nu_b (and mu_b step variance) admitted after pooling; pooled
// background means near zero would otherwise give a degenerate prior.
inline constexpr double k_min_nu_b = 1.0;

}  // namespace crj
