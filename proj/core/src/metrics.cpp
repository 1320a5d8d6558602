#include "crj/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "crj/error.hpp"

namespace crj {

namespace {

auto ratio(long long num, long long den) -> std::optional<double> {
  if (den == 0) {
    return std::nullopt;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

void write_value(std::ostream& out, const std::optional<double>& v) {
  if (v) {
    out << *v;
  }
}

}  // namespace

auto rmse_intensity(std::span<const double> truth, std::span<const double> estimate) -> double {
  if (truth.size() != estimate.size()) {
    throw Error{"rmse_intensity: length mismatch"};
  }
  if (truth.empty()) {
    throw Error{"rmse_intensity: empty traces"};
  }
  auto ss = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    auto d = truth[i] - estimate[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(truth.size()));
}

auto framewise_report(std::span<const int> truth_counts, std::span<const int> estimated_counts)
    -> Framewise_report {
  if (truth_counts.size() != estimated_counts.size()) {
    throw Error{"framewise_report: length mismatch"};
  }
  if (truth_counts.empty()) {
    throw Error{"framewise_report: no frames"};
  }
  auto r = Framewise_report{};
  auto truth_freq = std::map<int, long long>{};
  auto est_freq = std::map<int, long long>{};
  for (std::size_t i = 0; i < truth_counts.size(); ++i) {
    auto t = truth_counts[i];
    auto e = estimated_counts[i];
    if (e == t) {
      (t > 0 ? r.tp : r.tn) += 1;
    } else if (e > t) {
      r.fp += 1;
    } else {
      r.fn += 1;
    }
    truth_freq[t] += 1;
    est_freq[e] += 1;
  }
  auto n = static_cast<double>(truth_counts.size());
  r.accuracy = static_cast<double>(r.tp + r.tn) / n;
  r.precision = ratio(r.tp, r.tp + r.fp);
  r.sensitivity = ratio(r.tp, r.tp + r.fn);
  r.specificity = ratio(r.tn, r.tn + r.fp);
  auto chance = 0.0;
  for (const auto& [label, count] : truth_freq) {
    auto it = est_freq.find(label);
    if (it != est_freq.end()) {
      chance += (static_cast<double>(count) / n) * (static_cast<double>(it->second) / n);
    }
  }
  if (chance < 1.0) {
    r.cohens_kappa = (r.accuracy - chance) / (1.0 - chance);
  }
  return r;
}

auto param_abs_errors(const Intensity_params& truth, const Intensity_params& estimate) -> std::array<double, 4> {
  return {std::abs(truth.mu_f - estimate.mu_f), std::abs(truth.mu_b - estimate.mu_b),
          std::abs(truth.sigma_f2 - estimate.sigma_f2), std::abs(truth.sigma_b2 - estimate.sigma_b2)};
}

auto aggregate(std::span<const std::optional<double>> values) -> std::optional<Aggregate> {
  auto present = std::vector<double>{};
  for (const auto& v : values) {
    if (v) {
      present.push_back(*v);
    }
  }
  return aggregate(std::span<const double>{present});
}

auto aggregate(std::span<const double> values) -> std::optional<Aggregate> {
  if (values.empty()) {
    return std::nullopt;
  }
  auto n = static_cast<double>(values.size());
  auto mean = 0.0;
  for (auto v : values) {
    mean += v;
  }
  mean /= n;
  auto half = 0.0;
  if (values.size() > 1) {
    auto ss = 0.0;
    for (auto v : values) {
      ss += (v - mean) * (v - mean);
    }
    half = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return Aggregate{mean, half, values.size()};
}

auto metrics_csv(std::span<const Trace_metrics> rows) -> std::string {
  auto out = std::ostringstream{};
  out.precision(17);
  out << "trace_id,rmse,accuracy,precision,sensitivity,specificity,cohens_kappa,tp,tn,fp,fn,"
         "abs_err_mu_f,abs_err_mu_b,abs_err_sigma_f2,abs_err_sigma_b2\n";
  using Column = std::vector<std::optional<double>>;
  auto columns = std::vector<Column>(10);
  for (const auto& row : rows) {
    const auto& r = row.report;
    out << row.trace_id << ',' << row.rmse << ',' << r.accuracy << ',';
    write_value(out, r.precision);
    out << ',';
    write_value(out, r.sensitivity);
    out << ',';
    write_value(out, r.specificity);
    out << ',';
    write_value(out, r.cohens_kappa);
    out << ',' << r.tp << ',' << r.tn << ',' << r.fp << ',' << r.fn;
    for (auto e : row.abs_errors) {
      out << ',' << e;
    }
    out << '\n';
    auto values = std::array<std::optional<double>, 10>{
        row.rmse,       r.accuracy,        r.precision,       r.sensitivity,     r.specificity,
        r.cohens_kappa, row.abs_errors[0], row.abs_errors[1], row.abs_errors[2], row.abs_errors[3]};
    for (std::size_t c = 0; c < values.size(); ++c) {
      columns[c].push_back(values[c]);
    }
  }
  auto summary_row = [&](const char* label, bool mean) {
    auto cell = [&](std::size_t c) {
      auto a = aggregate(std::span<const std::optional<double>>{columns[c]});
      if (a) {
        out << (mean ? a->mean : a->half_width);
      }
    };
    out << label;
    for (std::size_t c = 0; c < 6; ++c) {
      out << ',';
      cell(c);
    }
    out << ",,,,";
    for (std::size_t c = 6; c < 10; ++c) {
      out << ',';
      cell(c);
    }
    out << '\n';
  };
  summary_row("mean", true);
  summary_row("ci95_half_width", false);
  return out.str();
}

}  // namespace crj
