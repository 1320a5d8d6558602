#include "crj/gibbs.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "crj/error.hpp"

namespace crj {

namespace {

constexpr double k_neg_inf = -std::numeric_limits<double>::infinity();

auto normal_draw(Rng& rng) -> double { return std::normal_distribution<double>{0.0, 1.0}(rng); }

auto accept(double log_ratio, Rng& rng) -> bool {
  return log_ratio >= 0.0 || std::log(uniform01(rng)) < log_ratio;
}

// log N(to; from, (scale * from)^2) up to the shared constant.
auto log_scaled_walk(double to, double from, double scale) -> double {
  auto sd = scale * from;
  auto z = (to - from) / sd;
  return -std::log(sd) - 0.5 * z * z;
}

}  // namespace

auto log_normal_prior(double x, double mean, double variance) -> double {
  auto d = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * variance) - d * d / (2.0 * variance);
}

auto log_inverse_gamma_prior(double x, double alpha, double beta) -> double {
  if (!(x > 0.0)) {
    return k_neg_inf;
  }
  return alpha * std::log(beta) - std::lgamma(alpha) - (alpha + 1.0) * std::log(x) - beta / x;
}

auto log_intensity_prior(const Intensity_params& params, const Hyperparams& hyper) -> double {
  return log_normal_prior(params.mu_f, hyper.eta_f, hyper.nu_f) +
         log_normal_prior(params.mu_b, hyper.eta_b, hyper.nu_b) +
         log_inverse_gamma_prior(params.sigma_f2, hyper.alpha_f, hyper.beta_f) +
         log_inverse_gamma_prior(params.sigma_b2, hyper.alpha_b, hyper.beta_b);
}

auto gibbs_update(std::span<const Dwelling_summary> dwellings, std::span<const int> counts,
                  const Intensity_params& params, const Hyperparams& hyper, Rng& rng,
                  const Gibbs_options& options) -> Intensity_params {
  if (dwellings.size() != counts.size()) {
    throw Error{"gibbs: counts must have one entry per dwelling"};
  }
  auto ll = [&](const Intensity_params& p) {
    return options.use_likelihood ? log_likelihood(dwellings, counts, p) : 0.0;
  };

  auto current = params;
  auto current_ll = ll(current);

  // Each step proposes one coordinate; `prior` is that coordinate's log prior.
  auto step = [&](double Intensity_params::*field, double proposed, double hastings, auto prior) {
    auto candidate = current;
    candidate.*field = proposed;
    auto candidate_ll = ll(candidate);
    auto lr = candidate_ll - current_ll + prior(proposed) - prior(current.*field) + hastings;
    if (accept(lr, rng)) {
      current = candidate;
      current_ll = candidate_ll;
    }
  };

  {
    auto proposed = current.mu_f + hyper.mu_f_step * normal_draw(rng);
    if (proposed > 0.0) {
      step(&Intensity_params::mu_f, proposed, 0.0,
           [&](double x) { return log_normal_prior(x, hyper.eta_f, hyper.nu_f); });
    }
  }
  {
    auto proposed = current.mu_b + hyper.mu_b_step * normal_draw(rng);
    step(&Intensity_params::mu_b, proposed, 0.0,
         [&](double x) { return log_normal_prior(x, hyper.eta_b, hyper.nu_b); });
  }
  auto variance_step = [&](double Intensity_params::*field, double alpha, double beta) {
    auto from = current.*field;
    auto proposed = from + hyper.variance_step * from * normal_draw(rng);
    // Zero-variance dwellings would make the likelihood undefined.
    if (!(proposed > 0.0)) {
      return;
    }
    auto hastings = log_scaled_walk(from, proposed, hyper.variance_step) -
                    log_scaled_walk(proposed, from, hyper.variance_step);
    step(field, proposed, hastings, [&](double x) { return log_inverse_gamma_prior(x, alpha, beta); });
  };
  variance_step(&Intensity_params::sigma_f2, hyper.alpha_f, hyper.beta_f);
  variance_step(&Intensity_params::sigma_b2, hyper.alpha_b, hyper.beta_b);
  return current;
}

auto gibbs_update(const Trace& trace, const Change_point_state& state, const Intensity_params& params,
                  const Hyperparams& hyper, Rng& rng, const Gibbs_options& options) -> Intensity_params {
  auto dwellings = summarize_dwellings(trace, state.locations);
  if (!dwellings) {
    throw Degenerate_configuration{"gibbs: state has an empty dwelling"};
  }
  return gibbs_update(*dwellings, state.counts, params, hyper, rng, options);
}

}  // namespace crj
