#include "crj_tools/io.hpp"

#include <glob.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>
#include <variant>

namespace crj::tools {

namespace {

auto trim(std::string_view s) -> std::string_view {
  auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

auto where(const std::string& source, std::size_t line, std::size_t col) -> std::string {
  return source + ":" + std::to_string(line) + ":" + std::to_string(col);
}

template <class T>
auto parse_field(std::string_view field, T& out) -> bool {
  auto f = trim(field);
  if (f.empty()) {
    return false;
  }
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), out);
  return ec == std::errc{} && ptr == f.data() + f.size();
}

// Member tables shared by the readers and writers of the config documents.
template <class S>
using Field = std::variant<double S::*, int S::*>;

template <class S>
struct Named_field {
  const char* name;
  Field<S> member;
};

const Named_field<Hyperparams> k_hyper_fields[] = {
    {"eta_f", &Hyperparams::eta_f},
    {"nu_f", &Hyperparams::nu_f},
    {"eta_b", &Hyperparams::eta_b},
    {"nu_b", &Hyperparams::nu_b},
    {"alpha_f", &Hyperparams::alpha_f},
    {"beta_f", &Hyperparams::beta_f},
    {"alpha_b", &Hyperparams::alpha_b},
    {"beta_b", &Hyperparams::beta_b},
    {"mu_f_step", &Hyperparams::mu_f_step},
    {"mu_b_step", &Hyperparams::mu_b_step},
    {"variance_step", &Hyperparams::variance_step},
    {"lambda", &Hyperparams::lambda},
    {"lambda_t", &Hyperparams::lambda_t},
    {"k_max", &Hyperparams::k_max},
    {"tau", &Hyperparams::tau},
    {"p_accept", &Hyperparams::p_accept},
    {"birth_death_cap", &Hyperparams::birth_death_cap},
    {"short_state_cap", &Hyperparams::short_state_cap},
    {"base_variance", &Hyperparams::base_variance},
    {"window_size", &Hyperparams::window_size},
    {"resolution", &Hyperparams::resolution},
    {"scaling_f", &Hyperparams::scaling_f},
    {"scaling_b", &Hyperparams::scaling_b},
    {"proposal_scale_f", &Hyperparams::proposal_scale_f},
    {"proposal_scale_b", &Hyperparams::proposal_scale_b},
};

const Named_field<Chain_config> k_chain_fields[] = {
    {"n_iter", &Chain_config::n_iter},
    {"burn_in_fraction", &Chain_config::burn_in_fraction},
    {"extension", &Chain_config::extension},
    {"max_iter", &Chain_config::max_iter},
    {"n_chains", &Chain_config::n_chains},
    {"psrf_threshold", &Chain_config::psrf_threshold},
    {"threads", &Chain_config::threads},
};

template <class S, std::size_t N>
auto fields_to_json(const S& s, const Named_field<S> (&fields)[N]) -> json {
  auto j = json::object();
  for (const auto& f : fields) {
    std::visit([&](auto member) { j[f.name] = s.*member; }, f.member);
  }
  return j;
}

template <class S, std::size_t N>
void assign_field(S& s, const Named_field<S> (&fields)[N], const std::string& key, const json& value) {
  for (const auto& f : fields) {
    if (key != f.name) {
      continue;
    }
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(s.*member)>;
          if constexpr (std::is_same_v<T, int>) {
            if (!value.is_number_integer()) {
              throw Key_error{key, "'" + key + "' must be an integer"};
            }
            s.*member = value.get<int>();
          } else {
            if (!value.is_number()) {
              throw Key_error{key, "'" + key + "' must be a number"};
            }
            s.*member = value.get<double>();
          }
        },
        f.member);
    return;
  }
  throw Key_error{key, "unknown key '" + key + "'"};
}

auto require_object(const json& j, const char* what) {
  if (!j.is_object()) {
    throw Error{std::string{what} + " must be a JSON object"};
  }
}

auto to_json(std::span<const double> values) -> json { return json(std::vector<double>(values.begin(), values.end())); }

auto seconds(std::span<const double> us) -> json {
  auto out = json::array();
  for (auto t : us) {
    out.push_back(t / k_us_per_second);
  }
  return out;
}

const char* const k_param_names[] = {"mu_f", "mu_b", "sigma_f2", "sigma_b2"};

}  // namespace

auto line_col(std::string_view text, std::size_t offset) -> std::pair<std::size_t, std::size_t> {
  offset = std::min(offset, text.size());
  auto line = std::size_t{1};
  auto line_start = std::size_t{0};
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      line_start = i + 1;
    }
  }
  return {line, offset - line_start + 1};
}

auto key_location(std::string_view text, std::string_view key, const std::string& source) -> std::string {
  auto needle = "\"" + std::string{key} + "\"";
  auto pos = text.find(needle);
  if (pos == std::string_view::npos) {
    return source;
  }
  auto [line, col] = line_col(text, pos);
  return where(source, line, col);
}

auto parse_trace_csv(std::string_view text, const std::string& source) -> Trace {
  auto times = std::vector<double>{};
  auto intensities = std::vector<double>{};
  auto line_no = std::size_t{0};
  auto header_seen = false;
  auto pos = std::size_t{0};
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (trim(line).empty()) {
      continue;
    }
    auto fields = std::vector<std::pair<std::string_view, std::size_t>>{};
    auto start = std::size_t{0};
    while (true) {
      auto comma = line.find(',', start);
      auto stop = comma == std::string_view::npos ? line.size() : comma;
      fields.emplace_back(line.substr(start, stop - start), start + 1);
      if (comma == std::string_view::npos) {
        break;
      }
      start = comma + 1;
    }
    if (!header_seen) {
      static constexpr std::string_view expected[] = {"frame", "time", "intensity"};
      if (fields.size() != 3) {
        throw Parse_error{where(source, line_no, 1), "header must be 'frame,time,intensity'"};
      }
      for (std::size_t c = 0; c < 3; ++c) {
        if (trim(fields[c].first) != expected[c]) {
          throw Parse_error{where(source, line_no, fields[c].second),
                            "expected column '" + std::string{expected[c]} + "'"};
        }
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) {
      auto col = fields.size() > 3 ? fields[3].second - 1 : line.size() + 1;
      throw Parse_error{where(source, line_no, col),
                        "expected 3 fields, found " + std::to_string(fields.size())};
    }
    auto frame = 0L;
    if (!parse_field(fields[0].first, frame)) {
      throw Parse_error{where(source, line_no, fields[0].second), "frame is not an integer"};
    }
    if (frame != static_cast<long>(times.size())) {
      throw Parse_error{where(source, line_no, fields[0].second),
                        "expected frame " + std::to_string(times.size())};
    }
    auto t = 0.0;
    if (!parse_field(fields[1].first, t) || !std::isfinite(t)) {
      throw Parse_error{where(source, line_no, fields[1].second), "time is not a finite number"};
    }
    auto t_us = std::round(t * k_us_per_second * 1e6) / 1e6;
    if (times.empty() ? !(t_us > 0.0) : !(t_us > times.back())) {
      throw Parse_error{where(source, line_no, fields[1].second),
                        times.empty() ? "time must be positive" : "time must increase"};
    }
    auto y = 0.0;
    if (!parse_field(fields[2].first, y) || !std::isfinite(y)) {
      throw Parse_error{where(source, line_no, fields[2].second), "intensity is not a finite number"};
    }
    times.push_back(t_us);
    intensities.push_back(y);
  }
  if (!header_seen) {
    throw Parse_error{where(source, 1, 1), "empty file"};
  }
  if (times.size() < 2) {
    throw Parse_error{where(source, line_no, 1), "at least two frames are required"};
  }
  auto diffs = std::vector<double>(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) {
    diffs[i - 1] = times[i] - times[i - 1];
  }
  std::nth_element(diffs.begin(), diffs.begin() + static_cast<std::ptrdiff_t>(diffs.size() / 2), diffs.end());
  auto length = times.back() + 0.5 * diffs[diffs.size() / 2];
  return Trace{std::move(times), std::move(intensities), length};
}

auto read_text(const fs::path& path) -> std::string {
  auto in = std::ifstream{path, std::ios::binary};
  if (!in) {
    throw Error{path.string() + ": cannot open file"};
  }
  auto ss = std::ostringstream{};
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    auto out = std::ofstream{tmp, std::ios::binary | std::ios::trunc};
    if (!out) {
      throw Error{path.string() + ": cannot write file"};
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
      throw Error{path.string() + ": write failed"};
    }
  }
  fs::rename(tmp, path);
}

auto read_trace_csv(const fs::path& path) -> Trace { return parse_trace_csv(read_text(path), path.string()); }

auto format_number(double value) -> std::string {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string{"nan"};
}

auto format_trace_csv(const Trace& trace) -> std::string {
  auto out = std::string{"frame,time,intensity\n"};
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_number(trace.times()[i] / k_us_per_second);
    out += ',';
    out += format_number(trace.intensities()[i]);
    out += '\n';
  }
  return out;
}

auto parse_json(std::string_view text, const std::string& source) -> json {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    auto what = std::string{e.what()};
    if (auto p = what.find("syntax error"); p != std::string::npos) {
      what = what.substr(p);
    }
    throw Parse_error{where(source, line, col), what};
  }
}

auto read_json(const fs::path& path) -> json { return parse_json(read_text(path), path.string()); }

auto expand_inputs(const std::vector<std::string>& patterns) -> std::vector<fs::path> {
  auto out = std::vector<fs::path>{};
  for (const auto& pattern : patterns) {
    auto g = glob_t{};
    if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
      for (std::size_t i = 0; i < g.gl_pathc; ++i) {
        out.emplace_back(g.gl_pathv[i]);
      }
    }
    ::globfree(&g);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

auto trace_id(const fs::path& path) -> std::string { return path.stem().string(); }

auto group_label(std::string_view id) -> std::string {
  static const auto pattern = std::regex{"(?:^|_)(mu[^_]+)_(snr[^_]+)(?:_|$)"};
  auto m = std::match_results<std::string_view::const_iterator>{};
  if (std::regex_search(id.begin(), id.end(), m, pattern)) {
    return m[1].str() + "_" + m[2].str();
  }
  return {};
}

auto to_json(const Hyperparams& h) -> json { return fields_to_json(h, k_hyper_fields); }

auto hyperparams_from_json(const json& j, const Hyperparams& base) -> Hyperparams {
  require_object(j, "hyperparameters");
  auto h = base;
  for (const auto& [key, value] : j.items()) {
    assign_field(h, k_hyper_fields, key, value);
  }
  return h;
}

auto to_json(const Chain_config& c) -> json {
  auto j = fields_to_json(c, k_chain_fields);
  j["seed"] = c.seed;
  return j;
}

auto chain_config_from_json(const json& j, const Chain_config& base) -> Chain_config {
  require_object(j, "chain configuration");
  auto c = base;
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") {
      if (!value.is_number_unsigned()) {
        throw Key_error{key, "'seed' must be a non-negative integer"};
      }
      c.seed = value.get<std::uint64_t>();
      continue;
    }
    assign_field(c, k_chain_fields, key, value);
  }
  return c;
}

auto to_json(const Intensity_params& p) -> json {
  return json{{"mu_f", p.mu_f}, {"mu_b", p.mu_b}, {"sigma_f2", p.sigma_f2}, {"sigma_b2", p.sigma_b2}};
}

auto intensity_params_from_json(const json& j) -> Intensity_params {
  require_object(j, "intensity parameters");
  auto p = Intensity_params{};
  auto get = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw Key_error{key, std::string{"'"} + key + "' must be a number"};
    }
    return j[key].get<double>();
  };
  p.mu_f = get("mu_f");
  p.mu_b = get("mu_b");
  p.sigma_f2 = get("sigma_f2");
  p.sigma_b2 = get("sigma_b2");
  return p;
}

auto to_json(const Sim_config& c) -> json {
  return json{{"n_fluorophores", c.n_fluorophores},
              {"mu_f", c.mu_f},
              {"snr", c.snr},
              {"snr_definition", c.snr_definition == Snr_definition::background_mean ? "background_mean"
                                                                                       : "background_std"},
              {"dur_blink", c.dur_blink},
              {"dur_dark", c.dur_dark},
              {"p_ab", c.p_ab},
              {"p_ad", c.p_ad},
              {"p_ap", c.p_ap},
              {"steps_per_frame", c.steps_per_frame},
              {"min_extra_frames", c.min_extra_frames},
              {"max_extra_frames", c.max_extra_frames},
              {"initial_dark_fraction", c.initial_dark_fraction}};
}

auto truth_to_json(const std::string& id, const Ground_truth& truth, const Sim_config& cfg) -> json {
  return json{{"id", id},
              {"n_fluorophores", truth.n_fluorophores},
              {"frame_counts", truth.counts},
              {"change_points", seconds(truth.change_points)},
              {"intensity", to_json(std::span<const double>{truth.intensity})},
              {"params", to_json(truth.params)},
              {"bleach_times", seconds(truth.bleach_times)},
              {"config", to_json(cfg)}};
}

auto summary_to_json(const std::string& id, const Posterior_summary& s) -> json {
  auto intervals = json::object();
  auto ess = json::object();
  auto mcse = json::object();
  for (std::size_t i = 0; i < 4; ++i) {
    intervals[k_param_names[i]] = json::array({s.credible_intervals[i].first, s.credible_intervals[i].second});
    ess[k_param_names[i]] = s.ess[i];
    mcse[k_param_names[i]] = s.mcse[i];
  }
  const auto& c = s.convergence;
  auto psrf_params = json::object();
  for (std::size_t i = 0; i < 4; ++i) {
    psrf_params[k_param_names[i]] = std::isfinite(c.psrf_params[i]) ? json(c.psrf_params[i]) : json(nullptr);
  }
  auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  auto psrf_locations = json::array();
  for (auto v : c.psrf_locations) {
    psrf_locations.push_back(finite_or_null(v));
  }
  return json{{"id", id},
              {"converged", s.converged},
              {"iterations", s.iterations},
              {"modal_k", s.modal_k},
              {"modal_k_probability", s.modal_k_probability},
              {"change_points", seconds(s.change_points)},
              {"dwelling_counts", s.dwelling_counts},
              {"frame_counts", s.frame_counts},
              {"predicted_intensity", to_json(std::span<const double>{s.predicted_intensity})},
              {"posterior_mean", to_json(s.posterior_mean)},
              {"credible_intervals", intervals},
              {"ess", ess},
              {"mcse", mcse},
              {"convergence",
               {{"converged", c.converged},
                {"pair", json::array({c.pair.first, c.pair.second})},
                {"psrf_k", finite_or_null(c.psrf_k)},
                {"modal_k", c.modal_k},
                {"retained", c.retained},
                {"psrf_locations", psrf_locations},
                {"psrf_params", psrf_params},
                {"reason", c.reason}}}};
}

auto chain_sample_csv(const Chain_sample& sample) -> std::string {
  auto out = std::string{"iteration,k,short_count,mu_f,mu_b,sigma_f2,sigma_b2,log_posterior,move,accepted,locations\n"};
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& r = sample[i];
    out += std::to_string(i) + ',' + std::to_string(r.k()) + ',' + std::to_string(r.short_count) + ',';
    out += format_number(r.params.mu_f) + ',' + format_number(r.params.mu_b) + ',';
    out += format_number(r.params.sigma_f2) + ',' + format_number(r.params.sigma_b2) + ',';
    out += format_number(r.log_posterior) + ',' + std::string{to_string(r.move)} + ',' + (r.accepted ? "1" : "0") + ',';
    for (std::size_t j = 0; j < r.locations.size(); ++j) {
      if (j > 0) {
        out += ';';
      }
      out += format_number(r.locations[j] / k_us_per_second);
    }
    out += '\n';
  }
  return out;
}

}  // namespace crj::tools
