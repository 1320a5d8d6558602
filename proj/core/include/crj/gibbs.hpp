#pragma once

#include <span>

#include "crj/model.hpp"
#include "crj/rng.hpp"
#include "crj/types.hpp"

namespace crj {

struct Gibbs_options {
  // When false the sweep targets the prior alone; used to check the kernel.
  bool use_likelihood = true;
};

auto log_normal_prior(double x, double mean, double variance) -> double;
auto log_inverse_gamma_prior(double x, double alpha, double beta) -> double;

// Sum of the four independent intensity-parameter log priors.
auto log_intensity_prior(const Intensity_params& params, const Hyperparams& hyper) -> double;

// One Metropolis-within-Gibbs sweep over mu_f, mu_b, sigma_f2, sigma_b2 in
// that order, holding the change points and counts fixed.
//
// Means use Gaussian random walks with standard deviations mu_f_step and
// mu_b_step; non-positive mu_f is rejected. Variances use a Gaussian walk
// with standard deviation variance_step * current value, which is not
// symmetric, so the Hastings correction is applied; non-positive proposals
// are rejected.
auto gibbs_update(std::span<const Dwelling_summary> dwellings, std::span<const int> counts,
                  const Intensity_params& params, const Hyperparams& hyper, Rng& rng,
                  const Gibbs_options& options = {}) -> Intensity_params;

auto gibbs_update(const Trace& trace, const Change_point_state& state, const Intensity_params& params,
                  const Hyperparams& hyper, Rng& rng, const Gibbs_options& options = {}) -> Intensity_params;

}  // namespace crj
