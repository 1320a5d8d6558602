#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crj/types.hpp"

namespace crj {

// Frame-wise agreement between true and estimated fluorophore counts. TP are
// frames whose counts match and are positive, TN frames where both are 0,
// FP frames that overestimate and FN frames that underestimate. Ratios with
// a zero denominator are absent.
struct Framewise_report {
  long long tp = 0;
  long long tn = 0;
  long long fp = 0;
  long long fn = 0;
  double accuracy = 0.0;
  std::optional<double> precision;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  // Multiclass Cohen's kappa over the integer count labels; absent when
  // chance agreement is 1.
  std::optional<double> cohens_kappa;
};

auto rmse_intensity(std::span<const double> truth, std::span<const double> estimate) -> double;

auto framewise_report(std::span<const int> truth_counts, std::span<const int> estimated_counts)
    -> Framewise_report;

// |truth - estimate| for mu_f, mu_b, sigma_f2, sigma_b2.
auto param_abs_errors(const Intensity_params& truth, const Intensity_params& estimate) -> std::array<double, 4>;

struct Trace_metrics {
  std::string trace_id;
  double rmse = 0.0;
  Framewise_report report;
  std::array<double, 4> abs_errors{};
};

// Mean and half-width of the normal-approximation 95% interval
// (1.96 sd / sqrt(n)) over the values present.
struct Aggregate {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t n = 0;
};

auto aggregate(std::span<const std::optional<double>> values) -> std::optional<Aggregate>;
auto aggregate(std::span<const double> values) -> std::optional<Aggregate>;

// One row per trace followed by mean and 95% half-width rows.
auto metrics_csv(std::span<const Trace_metrics> rows) -> std::string;

}  // namespace crj
