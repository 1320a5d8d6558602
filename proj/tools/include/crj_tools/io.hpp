#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crj/error.hpp"
#include "crj/sampler.hpp"
#include "crj/simulator.hpp"
#include "crj/types.hpp"

namespace crj::tools {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

inline constexpr double k_us_per_second = 1e6;

// A document that parsed but holds an unknown key or a value of the wrong
// type; callers anchor it to a line with key_location.
class Key_error : public Error {
 public:
  Key_error(std::string key, const std::string& what) : Error{what}, key_{std::move(key)} {}

  auto key() const -> const std::string& { return key_; }

 private:
  std::string key_;
};

// Trace CSV: header `frame,time,intensity`, time in seconds. Times are
// converted to microseconds and rounded to 1e-6 us so that printed seconds
// read back to the values they were written from. The trace length extends
// the last midpoint by half the median frame interval.
auto parse_trace_csv(std::string_view text, const std::string& source) -> Trace;
auto read_trace_csv(const fs::path& path) -> Trace;
auto format_trace_csv(const Trace& trace) -> std::string;

// Parses a JSON document; syntax errors become Parse_error anchored at
// source:line:col.
auto parse_json(std::string_view text, const std::string& source) -> json;
auto read_json(const fs::path& path) -> json;

// Line and column (both 1-based) of a byte offset.
auto line_col(std::string_view text, std::size_t offset) -> std::pair<std::size_t, std::size_t>;

// Location of the first occurrence of `"key"` in the text, for diagnostics on
// documents that parse but hold a bad value.
auto key_location(std::string_view text, std::string_view key, const std::string& source) -> std::string;

auto read_text(const fs::path& path) -> std::string;
// Writes through a temporary file and renames it into place.
void write_text(const fs::path& path, std::string_view text);

// Expands shell-style patterns; plain paths pass through when they exist.
// Results are sorted and deduplicated.
auto expand_inputs(const std::vector<std::string>& patterns) -> std::vector<fs::path>;

auto trace_id(const fs::path& path) -> std::string;

// Experiment label `mu<X>_snr<Y>` taken from ids such as f2_mu1000_snr0.1_r3;
// empty when the id carries no such label.
auto group_label(std::string_view id) -> std::string;

auto format_number(double value) -> std::string;

auto to_json(const Hyperparams& h) -> json;
// Keys absent from the document keep the values of `base`; unknown keys are
// rejected.
auto hyperparams_from_json(const json& j, const Hyperparams& base = {}) -> Hyperparams;

auto to_json(const Chain_config& c) -> json;
auto chain_config_from_json(const json& j, const Chain_config& base = {}) -> Chain_config;

auto to_json(const Intensity_params& p) -> json;
auto intensity_params_from_json(const json& j) -> Intensity_params;

auto to_json(const Sim_config& c) -> json;

auto truth_to_json(const std::string& id, const Ground_truth& truth, const Sim_config& cfg) -> json;
auto summary_to_json(const std::string& id, const Posterior_summary& s) -> json;
auto chain_sample_csv(const Chain_sample& sample) -> std::string;

}  // namespace crj::tools
