#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace crj {

// Time values throughout the library are in microseconds. Trace CSV files
// store seconds and are converted at the I/O boundary.
inline constexpr double k_default_bin_width = 20.0;

// Observed intensity series. Frame i covers a bin whose midpoint is times[i];
// length() is the time of the final frame boundary.
class Trace {
 public:
  Trace() = default;
  Trace(std::vector<double> times, std::vector<double> intensities, double length);

  // Evenly binned series: midpoints at (i + 0.5) * bin_width.
  static auto uniform(std::vector<double> intensities, double bin_width = k_default_bin_width) -> Trace;

  auto size() const -> std::size_t { return times_.size(); }
  auto times() const -> std::span<const double> { return times_; }
  auto intensities() const -> std::span<const double> { return intensities_; }
  auto length() const -> double { return length_; }

  // Median spacing between consecutive frame midpoints.
  auto frame_interval() const -> double;

  // Index of the first frame whose midpoint is >= t.
  auto first_frame_at_or_after(double t) const -> std::size_t;

 private:
  std::vector<double> times_;
  std::vector<double> intensities_;
  double length_ = 0.0;
};

// Trans-dimensional sampler state. `locations` holds the k interior change
// points s_1..s_k; the implicit end points are 0 and the trace length.
// counts[j] is the active fluorophore count of dwelling j (k + 1 entries).
struct Change_point_state {
  std::vector<double> locations;
  std::vector<int> counts;
  std::vector<bool> short_flags;
  int short_count = 0;

  auto num_change_points() const -> int { return static_cast<int>(locations.size()); }

  friend auto operator==(const Change_point_state&, const Change_point_state&) -> bool = default;
};

struct Intensity_params {
  double mu_f = 1000.0;     // mean single-fluorophore intensity
  double mu_b = 0.0;        // mean background intensity
  double sigma_f2 = 1000.0; // single-fluorophore variance
  double sigma_b2 = 1.0;    // background variance

  auto frame_mean(int n) const -> double { return mu_f * n + mu_b; }
  auto frame_variance(int n) const -> double { return sigma_f2 * n + sigma_b2; }

  friend auto operator==(const Intensity_params&, const Intensity_params&) -> bool = default;
};

// Fixed prior, proposal and move-probability constants. Defaults follow the
// tuned values of the reference simulation study; the intensity priors are
// placeholders that the pooling pre-pass normally overwrites.
struct Hyperparams {
  // Normal priors on the means (nu_* are variances).
  double eta_f = 1000.0;
  double nu_f = 5.0;
  double eta_b = 0.0;
  double nu_b = 1.0;
  // Inverse-gamma priors on the variances.
  double alpha_f = 1000.0;
  double beta_f = 1000.0 * 1001.0;
  double alpha_b = 10.0;
  double beta_b = 110.0;

  // Metropolis-within-Gibbs proposal scales. The mean steps are absolute
  // standard deviations; variance proposals use variance_step * current value.
  double mu_f_step = 5.0;
  double mu_b_step = 1.0;
  double variance_step = 0.1;

  // Change-point structure.
  double lambda = 2.5;     // Poisson mean of k
  double lambda_t = 0.001; // Poisson mean of k_t
  int k_max = 50;
  double tau = 10.0 * k_default_bin_width; // short-lived max duration (time units)
  double p_accept = 0.5;                   // duration-test probability at d = tau
  double birth_death_cap = 0.5;            // max over k of b_k + d_k
  double short_state_cap = 0.1;            // max over (k, k_t) of a + r

  // Location proposal distribution.
  double base_variance = 10000.0; // Gaussian bump variance (time units squared)
  int window_size = 10;           // frames per window
  double resolution = 0.0;        // grid spacing; 0 means one point per frame

  // Pooling factors.
  double scaling_f = 0.005;
  double scaling_b = 1.0;
  double proposal_scale_f = 0.005;
  double proposal_scale_b = 0.005;

  auto lambda_d() const -> double { return -std::log(p_accept) / tau; }

  friend auto operator==(const Hyperparams&, const Hyperparams&) -> bool = default;
};

}  // namespace crj
