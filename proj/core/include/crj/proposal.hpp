#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crj/rng.hpp"
#include "crj/types.hpp"

namespace crj {

// Discretized change-point location proposal. Grid point i sits at time
// (i + 1) * spacing, covering every multiple of the spacing inside (0, L).
// Cumulative masses are precomputed so that point lookups are O(1) and
// (restricted) draws are O(log n).
class Proposal_distribution {
 public:
  Proposal_distribution(double spacing, double length, std::vector<double> pmf);

  static auto uniform(double spacing, double length) -> Proposal_distribution;

  // Number of interior grid points for the given spacing.
  static auto grid_size(double spacing, double length) -> std::size_t;

  auto size() const -> std::size_t { return pmf_.size(); }
  auto spacing() const -> double { return spacing_; }
  auto length() const -> double { return length_; }
  auto pmf() const -> std::span<const double> { return pmf_; }

  auto time_at(std::size_t index) const -> double { return static_cast<double>(index + 1) * spacing_; }

  // Nearest grid point; throws for t outside (0, L).
  auto index_of(double t) const -> std::size_t;

  auto mass(std::size_t index) const -> double { return pmf_[index]; }
  // Mass divided by the grid spacing, i.e. the per-time-unit density that
  // replaces the uniform 1/L in dimension-changing acceptance ratios.
  auto density(std::size_t index) const -> double { return pmf_[index] / spacing_; }

  // Total mass of grid indices [first, last].
  auto mass_between(std::size_t first, std::size_t last) const -> double;

  auto sample(Rng& rng) const -> std::size_t;
  // Draw restricted to indices [first, last], renormalized.
  auto sample_between(std::size_t first, std::size_t last, Rng& rng) const -> std::size_t;

  auto argmax() const -> std::size_t;

 private:
  double spacing_;
  double length_;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

// Uniform floor share of the total mass; the remainder is spread over the
// Gaussian bumps.
inline constexpr double k_uniform_floor_share = 0.1;

// Preliminary scan: the whole-trace SNR (mean / std) scales the absolute
// differences of consecutive window means into z-scores; each window boundary
// receives a Gaussian bump of weight z and variance base_variance on top of a
// uniform floor. resolution <= 0 selects one grid point per frame.
auto build_proposal(const Trace& trace, int window_size, double base_variance, double resolution = 0.0)
    -> Proposal_distribution;

auto build_proposal(const Trace& trace, const Hyperparams& hyper) -> Proposal_distribution;

auto sample_location(const Proposal_distribution& dist, Rng& rng) -> double;

// Stored mass of the grid point nearest to t.
auto pmf_at(const Proposal_distribution& dist, double t) -> double;

}  // namespace crj
