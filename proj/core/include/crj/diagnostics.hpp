#pragma once

#include <span>
#include <vector>

namespace crj {

// Gelman-Rubin potential scale reduction factor for m >= 2 equal-length
// sequences: sqrt((W + B / n) / W) with W the mean within-chain variance and
// B / n the variance of the chain means. Identical chains give exactly 1.
// W = 0 gives 1 when the chains also agree (B = 0) and +inf otherwise.
auto psrf(std::span<const std::vector<double>> sequences) -> double;

// Effective sample size with Geyer's initial monotone positive sequence
// estimator of the integrated autocorrelation time, clamped to (0, n].
// Constant sequences return n.
auto ess(std::span<const double> sequence) -> double;

// Monte Carlo standard error of the mean: sample sd / sqrt(ess).
auto mcse(std::span<const double> sequence) -> double;

}  // namespace crj
