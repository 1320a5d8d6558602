#include "crj/simulator.hpp"

#include <cmath>
#include <limits>

#include "crj/error.hpp"

namespace crj {

namespace {

auto index(Fluorophore_state s) -> std::size_t { return static_cast<std::size_t>(s); }

auto poisson(double mean, Rng& rng) -> double {
  if (!(mean > 0.0)) {
    return 0.0;
  }
  return static_cast<double>(std::poisson_distribution<long long>{mean}(rng));
}

}  // namespace

auto build_transition_matrix(const Sim_config& cfg) -> Transition_matrix {
  if (!(cfg.dur_blink >= 1.0) || !(cfg.dur_dark >= 1.0)) {
    throw Error{"simulator: dwell durations must be at least one step"};
  }
  auto p = Transition_matrix{};
  p[0] = {1.0 - cfg.p_ab - cfg.p_ad - cfg.p_ap, cfg.p_ab, cfg.p_ad, cfg.p_ap};
  p[1] = {1.0 / cfg.dur_blink, 1.0 - 1.0 / cfg.dur_blink, 0.0, 0.0};
  p[2] = {1.0 / cfg.dur_dark, 0.0, 1.0 - 1.0 / cfg.dur_dark, 0.0};
  p[3] = {0.0, 0.0, 0.0, 1.0};
  for (const auto& row : p) {
    auto sum = 0.0;
    for (auto v : row) {
      if (!(v >= 0.0) || !(v <= 1.0)) {
        throw Error{"simulator: transition probabilities must lie in [0, 1]"};
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw Error{"simulator: transition matrix rows must sum to one"};
    }
  }
  return p;
}

auto next_state(const Transition_matrix& p, Fluorophore_state from, Rng& rng) -> Fluorophore_state {
  const auto& row = p[index(from)];
  auto u = uniform01(rng);
  for (auto j = 0; j + 1 < k_num_fluorophore_states; ++j) {
    u -= row[static_cast<std::size_t>(j)];
    if (u < 0.0) {
      return static_cast<Fluorophore_state>(j);
    }
  }
  return Fluorophore_state::bleached;
}

auto simulate_state_path(const Transition_matrix& p, Fluorophore_state start, std::size_t steps, Rng& rng)
    -> std::vector<Fluorophore_state> {
  auto path = std::vector<Fluorophore_state>{};
  path.reserve(steps + 1);
  path.push_back(start);
  for (std::size_t i = 0; i < steps; ++i) {
    path.push_back(next_state(p, path.back(), rng));
  }
  return path;
}

auto background_component_mean(const Sim_config& cfg) -> double {
  if (std::isinf(cfg.snr)) {
    return 0.0;
  }
  if (!(cfg.snr > 0.0)) {
    throw Error{"simulator: snr must be positive"};
  }
  switch (cfg.snr_definition) {
    case Snr_definition::background_mean:
      return cfg.mu_f / (2.0 * cfg.snr);
    case Snr_definition::background_std: {
      auto sd = cfg.mu_f / cfg.snr;
      return 0.5 * sd * sd;
    }
  }
  return 0.0;
}

auto simulate_trace(const Sim_config& cfg, Rng& rng) -> Simulated_trace {
  if (cfg.n_fluorophores < 0) {
    throw Error{"simulator: fluorophore count must be non-negative"};
  }
  if (cfg.steps_per_frame < 1) {
    throw Error{"simulator: steps_per_frame must be positive"};
  }
  if (cfg.min_extra_frames < 1 || cfg.max_extra_frames < cfg.min_extra_frames) {
    throw Error{"simulator: invalid post-bleach frame range"};
  }
  if (!(cfg.mu_f > 0.0)) {
    throw Error{"simulator: mu_f must be positive"};
  }
  auto p = build_transition_matrix(cfg);
  auto spf = static_cast<std::size_t>(cfg.steps_per_frame);

  // active steps per frame, accumulated over fluorophores
  auto active = std::vector<double>{};
  auto truth = Ground_truth{};
  truth.n_fluorophores = cfg.n_fluorophores;
  for (auto f = 0; f < cfg.n_fluorophores; ++f) {
    auto state = uniform01(rng) < cfg.initial_dark_fraction ? Fluorophore_state::dark : Fluorophore_state::active;
    auto step = std::size_t{0};
    while (state != Fluorophore_state::bleached) {
      if (state == Fluorophore_state::active) {
        auto frame = step / spf;
        if (frame >= active.size()) {
          active.resize(frame + 1, 0.0);
        }
        active[frame] += 1.0;
      }
      state = next_state(p, state, rng);
      ++step;
    }
    truth.bleach_times.push_back(static_cast<double>(step));
  }

  auto bleach_frames = active.size();
  auto extra = std::uniform_int_distribution<int>{cfg.min_extra_frames, cfg.max_extra_frames}(rng);
  auto n_frames = std::max<std::size_t>(bleach_frames + static_cast<std::size_t>(extra), 2);
  active.resize(n_frames, 0.0);

  auto m = background_component_mean(cfg);
  auto intensities = std::vector<double>(n_frames);
  truth.counts.resize(n_frames);
  truth.intensity.resize(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    auto fraction = active[i] / static_cast<double>(spf);
    auto y = poisson(cfg.mu_f * fraction, rng);
    if (m > 0.0) {
      y += poisson(m, rng) + std::normal_distribution<double>{m, std::sqrt(m)}(rng) - 2.0 * m;
    }
    intensities[i] = y;
    truth.counts[i] = static_cast<int>(std::lround(fraction));
    truth.intensity[i] = cfg.mu_f * truth.counts[i];
  }
  auto bin = static_cast<double>(spf);
  for (std::size_t i = 1; i < n_frames; ++i) {
    if (truth.counts[i] != truth.counts[i - 1]) {
      truth.change_points.push_back(static_cast<double>(i) * bin);
    }
  }
  truth.params = Intensity_params{cfg.mu_f, 0.0, cfg.mu_f, 2.0 * m};
  return Simulated_trace{Trace::uniform(std::move(intensities), bin), std::move(truth)};
}

}  // namespace crj
