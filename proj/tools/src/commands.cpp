#include "crj_tools/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <thread>

#include "crj/metrics.hpp"
#include "crj/proposal.hpp"
#include "crj/version.hpp"

namespace crj::tools {

namespace {

using Clock = std::chrono::steady_clock;

auto seconds_since(Clock::time_point start) -> double {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs task(i) for every i in [0, n) on a pool of workers. Each task writes
// only its own result slot; the first exception is rethrown after the join.
template <class Task>
void for_each_index(std::size_t n, int workers, Task task) {
  auto next = std::atomic<std::size_t>{0};
  auto errors = std::vector<std::exception_ptr>(n);
  auto work = [&] {
    for (auto i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  auto count = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  auto pool = std::vector<std::thread>{};
  for (std::size_t w = 1; w < count; ++w) {
    pool.emplace_back(work);
  }
  work();
  for (auto& t : pool) {
    t.join();
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

auto dump(const json& j) -> std::string { return j.dump(2) + "\n"; }

// Reads a config document and converts it, anchoring value errors to the line
// of the offending key.
template <class Convert>
auto load_config(const fs::path& path, Convert convert) {
  auto text = read_text(path);
  auto doc = parse_json(text, path.string());
  try {
    return convert(doc);
  } catch (const Key_error& e) {
    throw Parse_error{key_location(text, e.key(), path.string()), e.what()};
  } catch (const json::exception& e) {
    throw Parse_error{path.string(), e.what()};
  }
}

auto manifest_base(const std::string& command) -> json {
  return json{{"tool", "crjmcmc"},
              {"version", k_version},
              {"command", command},
              {"versions",
               {{"crjmcmc", k_version},
                {"compiler", __VERSION__},
                {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                      std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                      std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}}};
}

auto path_strings(const std::vector<fs::path>& paths) -> json {
  auto out = json::array();
  for (const auto& p : paths) {
    out.push_back(p.string());
  }
  return out;
}

auto resolve_inputs(const std::vector<std::string>& patterns) -> std::vector<fs::path> {
  auto files = expand_inputs(patterns);
  if (files.empty()) {
    auto joined = std::string{};
    for (const auto& p : patterns) {
      joined += (joined.empty() ? "" : " ") + p;
    }
    throw Error{"no input files match '" + joined + "'"};
  }
  auto ids = std::map<std::string, fs::path>{};
  for (const auto& f : files) {
    auto [it, inserted] = ids.emplace(trace_id(f), f);
    if (!inserted) {
      throw Error{"duplicate trace id '" + it->first + "' (" + it->second.string() + ", " + f.string() + ")"};
    }
  }
  return files;
}

auto read_traces(const std::vector<fs::path>& files, int workers) -> std::vector<Trace> {
  auto traces = std::vector<Trace>(files.size());
  for_each_index(files.size(), workers, [&](std::size_t i) { traces[i] = read_trace_csv(files[i]); });
  return traces;
}

auto label_for(const std::string& id, const std::optional<std::string>& tag) -> std::string {
  if (tag) {
    return *tag;
  }
  auto label = group_label(id);
  return label.empty() ? "default" : label;
}

auto get_int_list(const json& v, const std::string& key) -> std::vector<int> {
  if (v.is_number_integer()) {
    return {v.get<int>()};
  }
  if (v.is_string()) {
    auto s = v.get<std::string>();
    auto dots = s.find("..");
    if (dots != std::string::npos) {
      try {
        auto lo = std::stoi(s.substr(0, dots));
        auto hi = std::stoi(s.substr(dots + 2));
        if (lo <= hi) {
          auto out = std::vector<int>{};
          for (auto n = lo; n <= hi; ++n) {
            out.push_back(n);
          }
          return out;
        }
      } catch (const std::exception&) {
      }
    }
    throw Key_error{key, "'" + key + "' must look like \"1..4\""};
  }
  if (v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number_integer(); })) {
    return v.get<std::vector<int>>();
  }
  throw Key_error{key, "'" + key + "' must be an integer, a non-empty integer array or a range \"a..b\""};
}

auto get_number_list(const json& v, const std::string& key) -> std::vector<double> {
  if (v.is_number()) {
    return {v.get<double>()};
  }
  if (v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); })) {
    return v.get<std::vector<double>>();
  }
  throw Key_error{key, "'" + key + "' must be a number or a non-empty number array"};
}

auto get_number(const json& v, const std::string& key) -> double {
  if (!v.is_number()) {
    throw Key_error{key, "'" + key + "' must be a number"};
  }
  return v.get<double>();
}

auto get_int(const json& v, const std::string& key) -> int {
  if (!v.is_number_integer()) {
    throw Key_error{key, "'" + key + "' must be an integer"};
  }
  return v.get<int>();
}

void simulate_impl(const Sim_grid& grid, const fs::path& out, int workers, json options) {
  auto start = Clock::now();
  struct Cell {
    std::string id;
    Sim_config cfg;
  };
  auto cells = std::vector<Cell>{};
  for (auto n : grid.fluorophores) {
    for (auto mu : grid.mu_f) {
      for (auto snr : grid.snr) {
        for (auto r = 0; r < grid.replicates; ++r) {
          auto cfg = grid.base;
          cfg.n_fluorophores = n;
          cfg.mu_f = mu;
          cfg.snr = snr;
          cells.push_back({simulation_id(n, mu, snr, r), cfg});
        }
      }
    }
  }
  // Validate once up front so that a bad matrix fails before any output.
  build_transition_matrix(grid.base);

  auto timings = std::vector<double>(cells.size());
  for_each_index(cells.size(), workers, [&](std::size_t i) {
    auto t0 = Clock::now();
    const auto& cell = cells[i];
    auto rng = Rng{trace_seed(grid.seed, cell.id)};
    auto sim = simulate_trace(cell.cfg, rng);
    write_text(out / "traces" / (cell.id + ".csv"), format_trace_csv(sim.trace));
    write_text(out / "truth" / (cell.id + ".json"), dump(truth_to_json(cell.id, sim.truth, cell.cfg)));
    timings[i] = seconds_since(t0);
  });

  auto manifest = manifest_base("simulate");
  manifest["options"] = std::move(options);
  manifest["config"] = to_json(grid);
  manifest["seed"] = grid.seed;
  manifest["inputs"] = json::array();
  auto seeds = json::object();
  auto outputs = json::object();
  auto per_trace = json::object();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& id = cells[i].id;
    seeds[id] = trace_seed(grid.seed, id);
    outputs[id] = {(fs::path{"traces"} / (id + ".csv")).string(), (fs::path{"truth"} / (id + ".json")).string()};
    per_trace[id] = timings[i];
  }
  manifest["trace_seeds"] = seeds;
  manifest["outputs"] = outputs;
  manifest["timings"] = {{"workers", workers}, {"total_seconds", seconds_since(start)}, {"per_trace_seconds", per_trace}};
  write_text(out / "manifest.json", dump(manifest));
}

void hyperparams_impl(const std::vector<fs::path>& files, const Hyperparams& base, const std::optional<std::string>& tag,
                      Pool_weighting weighting, const fs::path& out, int workers, json options) {
  auto start = Clock::now();
  auto traces = read_traces(files, workers);
  auto estimates = std::vector<Trace_hyper_estimate>(files.size());
  for_each_index(files.size(), workers, [&](std::size_t i) {
    auto dist = build_proposal(traces[i], base);
    estimates[i] = estimate_trace_hyperparams(traces[i], dist, std::nullopt, weighting, base.window_size);
  });

  auto groups = std::map<std::string, std::vector<std::size_t>>{};
  for (std::size_t i = 0; i < files.size(); ++i) {
    groups[label_for(trace_id(files[i]), tag)].push_back(i);
  }
  auto doc = json::object();
  doc["weighting"] = weighting == Pool_weighting::homogeneous ? "homogeneous" : "heterogeneous";
  auto out_groups = json::object();
  for (const auto& [label, members] : groups) {
    auto subset = std::vector<Trace_hyper_estimate>{};
    auto per_trace = json::array();
    for (auto i : members) {
      subset.push_back(estimates[i]);
      const auto& e = estimates[i];
      per_trace.push_back({{"id", trace_id(files[i])},
                           {"eta_f", e.eta_f},
                           {"eta_b", e.eta_b},
                           {"alpha_f", e.alpha_f},
                           {"beta_f", e.beta_f},
                           {"alpha_b", e.alpha_b},
                           {"beta_b", e.beta_b},
                           {"weight", e.weight},
                           {"low_confidence", e.low_confidence},
                           {"intensity_floor", e.intensity_floor}});
    }
    out_groups[label] = {{"hyperparams", to_json(pool_hyperparams(subset, base))}, {"traces", per_trace}};
  }
  doc["groups"] = out_groups;
  write_text(out, dump(doc));

  auto manifest = manifest_base("hyperparams");
  manifest["options"] = std::move(options);
  manifest["config"] = to_json(base);
  manifest["inputs"] = path_strings(files);
  manifest["outputs"] = {out.filename().string()};
  manifest["timings"] = {{"workers", workers}, {"total_seconds", seconds_since(start)}};
  auto manifest_path = out;
  manifest_path += ".manifest.json";
  write_text(manifest_path, dump(manifest));
}

auto hyper_for(const json& doc, const std::string& label, const std::string& source) -> Hyperparams {
  if (!doc.contains("groups")) {
    return hyperparams_from_json(doc);
  }
  const auto& groups = doc["groups"];
  if (!groups.is_object() || groups.empty()) {
    throw Error{source + ": 'groups' must be a non-empty object"};
  }
  auto pick = [&](const json& g) {
    if (!g.is_object() || !g.contains("hyperparams")) {
      throw Error{source + ": group without 'hyperparams'"};
    }
    return hyperparams_from_json(g["hyperparams"]);
  };
  if (groups.contains(label)) {
    return pick(groups[label]);
  }
  if (groups.size() == 1) {
    return pick(groups.begin().value());
  }
  throw Error{source + ": no hyperparameter group '" + label + "'"};
}

void analyze_impl(const std::vector<fs::path>& files, const json& hyper_doc, const std::string& hyper_source,
                  const Chain_config& config, const std::optional<std::string>& tag, bool write_samples,
                  const fs::path& out, int workers, json options) {
  auto start = Clock::now();
  validate(config);
  auto traces = read_traces(files, workers);
  auto ids = std::vector<std::string>{};
  auto hypers = std::vector<Hyperparams>{};
  for (const auto& f : files) {
    ids.push_back(trace_id(f));
    try {
      hypers.push_back(hyper_for(hyper_doc, label_for(ids.back(), tag), hyper_source));
    } catch (const Key_error& e) {
      throw Error{hyper_source + ": " + e.what()};
    }
  }

  // Chains of one trace take priority; leftover workers go to other traces.
  auto chain_threads = std::min(config.n_chains, workers);
  auto trace_workers = std::max(1, workers / chain_threads);
  auto timings = std::vector<double>(files.size());
  auto converged = std::vector<char>(files.size());
  for_each_index(files.size(), trace_workers, [&](std::size_t i) {
    auto t0 = Clock::now();
    auto cfg = config;
    cfg.seed = trace_seed(config.seed, ids[i]);
    cfg.threads = chain_threads;
    auto result = analyze(traces[i], hypers[i], cfg);
    write_text(out / (ids[i] + ".json"), dump(summary_to_json(ids[i], result.summary)));
    if (write_samples) {
      for (std::size_t c = 0; c < result.chains.size(); ++c) {
        write_text(out / "samples" / (ids[i] + "_chain" + std::to_string(c) + ".csv"),
                   chain_sample_csv(result.chains[c]));
      }
    }
    converged[i] = result.summary.converged ? 1 : 0;
    timings[i] = seconds_since(t0);
  });

  auto manifest = manifest_base("analyze");
  manifest["options"] = std::move(options);
  manifest["config"] = to_json(config);
  manifest["hyperparams"] = hyper_doc;
  manifest["seed"] = config.seed;
  manifest["inputs"] = path_strings(files);
  auto seeds = json::object();
  auto outputs = json::object();
  auto per_trace = json::object();
  auto n_converged = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    seeds[ids[i]] = trace_seed(config.seed, ids[i]);
    auto paths = json::array({ids[i] + ".json"});
    if (write_samples) {
      for (auto c = 0; c < config.n_chains; ++c) {
        paths.push_back((fs::path{"samples"} / (ids[i] + "_chain" + std::to_string(c) + ".csv")).string());
      }
    }
    outputs[ids[i]] = paths;
    per_trace[ids[i]] = timings[i];
    n_converged += converged[i];
  }
  manifest["trace_seeds"] = seeds;
  manifest["outputs"] = outputs;
  manifest["converged"] = n_converged;
  manifest["timings"] = {{"workers", workers},
                         {"chain_threads", chain_threads},
                         {"total_seconds", seconds_since(start)},
                         {"per_trace_seconds", per_trace}};
  write_text(out / "manifest.json", dump(manifest));
}

struct Estimate_file {
  std::vector<int> counts;
  std::vector<double> intensity;
  Intensity_params params;
};

// Accepts posterior summaries and ground-truth documents alike.
auto read_estimate(const fs::path& path) -> Estimate_file {
  auto text = read_text(path);
  auto doc = parse_json(text, path.string());
  auto source = path.string();
  auto pick = [&](std::initializer_list<const char*> keys) -> const json& {
    for (auto k : keys) {
      if (doc.contains(k)) {
        return doc[k];
      }
    }
    throw Parse_error{source, std::string{"missing '"} + *keys.begin() + "'"};
  };
  try {
    if (!doc.is_object()) {
      throw Parse_error{source, "expected a JSON object"};
    }
    auto e = Estimate_file{};
    e.counts = pick({"frame_counts"}).get<std::vector<int>>();
    e.intensity = pick({"predicted_intensity", "intensity"}).get<std::vector<double>>();
    e.params = intensity_params_from_json(pick({"posterior_mean", "params"}));
    return e;
  } catch (const Key_error& e) {
    throw Parse_error{key_location(text, e.key(), source), e.what()};
  } catch (const json::exception& e) {
    throw Parse_error{source, e.what()};
  }
}

auto json_files(const fs::path& dir) -> std::map<std::string, fs::path> {
  if (!fs::is_directory(dir)) {
    throw Error{dir.string() + ": not a directory"};
  }
  auto out = std::map<std::string, fs::path>{};
  for (const auto& entry : fs::directory_iterator{dir}) {
    const auto& p = entry.path();
    if (!entry.is_regular_file() || p.extension() != ".json" || p.filename() == "manifest.json") {
      continue;
    }
    out.emplace(p.stem().string(), p);
  }
  return out;
}

void metrics_impl(const fs::path& estimates_dir, const fs::path& truth_dir, const fs::path& out, json options) {
  auto start = Clock::now();
  auto estimates = json_files(estimates_dir);
  auto truths = json_files(truth_dir);
  auto orphans = std::vector<std::string>{};
  for (const auto& [id, _] : estimates) {
    if (!truths.contains(id)) {
      orphans.push_back(id + " (no ground truth)");
    }
  }
  for (const auto& [id, _] : truths) {
    if (!estimates.contains(id)) {
      orphans.push_back(id + " (no estimate)");
    }
  }
  if (!orphans.empty()) {
    auto msg = std::string{"mismatched trace ids:"};
    for (const auto& o : orphans) {
      msg += "\n  " + o;
    }
    throw Error{msg};
  }
  if (estimates.empty()) {
    throw Error{estimates_dir.string() + ": no estimate files"};
  }
  auto rows = std::vector<Trace_metrics>{};
  for (const auto& [id, path] : estimates) {
    auto e = read_estimate(path);
    auto t = read_estimate(truths.at(id));
    if (e.counts.size() != t.counts.size() || e.intensity.size() != t.intensity.size()) {
      throw Error{id + ": estimate and ground truth differ in frame count"};
    }
    auto row = Trace_metrics{};
    row.trace_id = id;
    row.rmse = rmse_intensity(t.intensity, e.intensity);
    row.report = framewise_report(t.counts, e.counts);
    row.abs_errors = param_abs_errors(t.params, e.params);
    rows.push_back(std::move(row));
  }
  write_text(out, metrics_csv(rows));

  auto manifest = manifest_base("metrics");
  manifest["options"] = std::move(options);
  auto inputs = json::array();
  for (const auto& [id, path] : estimates) {
    inputs.push_back(path.string());
    inputs.push_back(truths.at(id).string());
  }
  manifest["inputs"] = inputs;
  manifest["outputs"] = {out.filename().string()};
  manifest["timings"] = {{"total_seconds", seconds_since(start)}};
  auto manifest_path = out;
  manifest_path += ".manifest.json";
  write_text(manifest_path, dump(manifest));
}

auto weighting_name(Pool_weighting w) -> std::string {
  return w == Pool_weighting::homogeneous ? "homogeneous" : "heterogeneous";
}

auto optional_string(const json& j, const char* key) -> std::optional<std::string> {
  if (j.contains(key) && j[key].is_string()) {
    return j[key].get<std::string>();
  }
  return std::nullopt;
}

}  // namespace

auto simulation_id(int n_fluorophores, double mu_f, double snr, int replicate) -> std::string {
  return "f" + std::to_string(n_fluorophores) + "_mu" + format_number(mu_f) + "_snr" + format_number(snr) + "_r" +
         std::to_string(replicate);
}

auto trace_seed(std::uint64_t base, const std::string& id) -> std::uint64_t { return derive_seed(base, hash_id(id)); }

auto resolve_workers(int requested) -> int {
  if (requested > 0) {
    return requested;
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

auto sim_grid_from_json(const json& j) -> Sim_grid {
  if (!j.is_object()) {
    throw Error{"simulation config must be a JSON object"};
  }
  auto g = Sim_grid{};
  for (const auto& [key, v] : j.items()) {
    if (key == "seed") {
      if (!v.is_number_unsigned()) {
        throw Key_error{key, "'seed' must be a non-negative integer"};
      }
      g.seed = v.get<std::uint64_t>();
    } else if (key == "replicates") {
      g.replicates = get_int(v, key);
    } else if (key == "fluorophores") {
      g.fluorophores = get_int_list(v, key);
    } else if (key == "mu_f") {
      g.mu_f = get_number_list(v, key);
    } else if (key == "snr") {
      g.snr = get_number_list(v, key);
    } else if (key == "snr_definition") {
      auto s = v.is_string() ? v.get<std::string>() : std::string{};
      if (s == "background_mean") {
        g.base.snr_definition = Snr_definition::background_mean;
      } else if (s == "background_std") {
        g.base.snr_definition = Snr_definition::background_std;
      } else {
        throw Key_error{key, "'snr_definition' must be \"background_mean\" or \"background_std\""};
      }
    } else if (key == "dur_blink") {
      g.base.dur_blink = get_number(v, key);
    } else if (key == "dur_dark") {
      g.base.dur_dark = get_number(v, key);
    } else if (key == "p_ab") {
      g.base.p_ab = get_number(v, key);
    } else if (key == "p_ad") {
      g.base.p_ad = get_number(v, key);
    } else if (key == "p_ap") {
      g.base.p_ap = get_number(v, key);
    } else if (key == "steps_per_frame") {
      g.base.steps_per_frame = get_int(v, key);
    } else if (key == "min_extra_frames") {
      g.base.min_extra_frames = get_int(v, key);
    } else if (key == "max_extra_frames") {
      g.base.max_extra_frames = get_int(v, key);
    } else if (key == "initial_dark_fraction") {
      g.base.initial_dark_fraction = get_number(v, key);
    } else {
      throw Key_error{key, "unknown key '" + key + "'"};
    }
  }
  if (g.replicates < 0) {
    throw Key_error{"replicates", "'replicates' must be non-negative"};
  }
  if (std::any_of(g.fluorophores.begin(), g.fluorophores.end(), [](int n) { return n < 1; })) {
    throw Key_error{"fluorophores", "'fluorophores' must be positive"};
  }
  if (std::any_of(g.mu_f.begin(), g.mu_f.end(), [](double m) { return !(m > 0.0); })) {
    throw Key_error{"mu_f", "'mu_f' must be positive"};
  }
  if (std::any_of(g.snr.begin(), g.snr.end(), [](double s) { return !(s > 0.0); })) {
    throw Key_error{"snr", "'snr' must be positive"};
  }
  return g;
}

auto to_json(const Sim_grid& g) -> json {
  auto j = json{{"seed", g.seed}, {"replicates", g.replicates}, {"fluorophores", g.fluorophores},
                {"mu_f", g.mu_f}, {"snr", g.snr}};
  auto base = to_json(g.base);
  for (const auto& [key, value] : base.items()) {
    if (key != "n_fluorophores" && key != "mu_f" && key != "snr") {
      j[key] = value;
    }
  }
  return j;
}

void cmd_simulate(const Simulate_options& opts) {
  auto grid = opts.common.config ? load_config(*opts.common.config, sim_grid_from_json) : Sim_grid{};
  if (opts.common.seed) {
    grid.seed = *opts.common.seed;
  }
  auto workers = resolve_workers(opts.common.workers);
  simulate_impl(grid, opts.out, workers, json{{"out", opts.out.string()}, {"workers", opts.common.workers}});
}

void cmd_hyperparams(const Hyperparams_options& opts) {
  auto base = opts.common.config
                  ? load_config(*opts.common.config, [](const json& j) { return hyperparams_from_json(j); })
                  : Hyperparams{};
  auto files = resolve_inputs(opts.inputs);
  auto workers = resolve_workers(opts.common.workers);
  auto options = json{{"out", opts.out.string()},
                      {"workers", opts.common.workers},
                      {"weighting", weighting_name(opts.weighting)}};
  if (opts.tag) {
    options["tag"] = *opts.tag;
  }
  hyperparams_impl(files, base, opts.tag, opts.weighting, opts.out, workers, std::move(options));
}

void cmd_analyze(const Analyze_options& opts) {
  auto config = opts.common.config
                    ? load_config(*opts.common.config, [](const json& j) { return chain_config_from_json(j); })
                    : Chain_config{};
  if (opts.common.seed) {
    config.seed = *opts.common.seed;
  }
  if (opts.max_iter) {
    config.max_iter = *opts.max_iter;
  }
  if (opts.psrf_threshold) {
    config.psrf_threshold = *opts.psrf_threshold;
  }
  if (!fs::exists(opts.hyper)) {
    throw Error{opts.hyper.string() + ": hyperparameter file not found"};
  }
  auto hyper_text = read_text(opts.hyper);
  auto hyper_doc = parse_json(hyper_text, opts.hyper.string());
  try {
    // Validate every group before any chain runs.
    if (hyper_doc.contains("groups") && hyper_doc["groups"].is_object()) {
      for (const auto& [label, g] : hyper_doc["groups"].items()) {
        hyper_for(hyper_doc, label, opts.hyper.string());
      }
    } else {
      hyper_for(hyper_doc, "", opts.hyper.string());
    }
  } catch (const Key_error& e) {
    throw Parse_error{key_location(hyper_text, e.key(), opts.hyper.string()), e.what()};
  }
  auto files = resolve_inputs(opts.inputs);
  auto workers = resolve_workers(opts.common.workers);
  auto options = json{{"out", opts.out.string()},
                      {"workers", opts.common.workers},
                      {"hyper", opts.hyper.string()},
                      {"write_samples", opts.write_samples}};
  if (opts.tag) {
    options["tag"] = *opts.tag;
  }
  analyze_impl(files, hyper_doc, opts.hyper.string(), config, opts.tag, opts.write_samples, opts.out, workers,
               std::move(options));
}

void cmd_metrics(const Metrics_options& opts) {
  metrics_impl(opts.estimates, opts.truth, opts.out,
               json{{"estimates", opts.estimates.string()}, {"truth", opts.truth.string()}, {"out", opts.out.string()}});
}

void cmd_replay(const fs::path& manifest_path, const std::optional<fs::path>& out_override) {
  auto text = read_text(manifest_path);
  auto m = parse_json(text, manifest_path.string());
  auto source = manifest_path.string();
  try {
    if (!m.is_object() || m.value("tool", "") != "crjmcmc" || !m.contains("command") || !m.contains("options")) {
      throw Parse_error{source, "not a crjmcmc manifest"};
    }
    auto command = m["command"].get<std::string>();
    const auto& options = m["options"];
    auto workers = resolve_workers(options.value("workers", 0));
    auto inputs = std::vector<fs::path>{};
    for (const auto& p : m.value("inputs", json::array())) {
      inputs.emplace_back(p.get<std::string>());
    }
    auto out = out_override ? *out_override : fs::path{options["out"].get<std::string>()};
    if (command == "simulate") {
      simulate_impl(sim_grid_from_json(m["config"]), out, workers, options);
    } else if (command == "hyperparams") {
      auto weighting = options.value("weighting", "homogeneous") == "heterogeneous" ? Pool_weighting::heterogeneous
                                                                                     : Pool_weighting::homogeneous;
      hyperparams_impl(inputs, hyperparams_from_json(m["config"]), optional_string(options, "tag"), weighting, out,
                       workers, options);
    } else if (command == "analyze") {
      analyze_impl(inputs, m["hyperparams"], options.value("hyper", source), chain_config_from_json(m["config"]),
                   optional_string(options, "tag"), options.value("write_samples", false), out, workers, options);
    } else if (command == "metrics") {
      metrics_impl(options["estimates"].get<std::string>(), options["truth"].get<std::string>(), out, options);
    } else {
      throw Parse_error{key_location(text, "command", source), "unknown command '" + command + "'"};
    }
  } catch (const Key_error& e) {
    throw Parse_error{key_location(text, e.key(), source), e.what()};
  } catch (const json::exception& e) {
    throw Parse_error{source, e.what()};
  }
}

}  // namespace crj::tools
