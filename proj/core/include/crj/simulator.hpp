#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "crj/rng.hpp"
#include "crj/types.hpp"

namespace crj {

enum class Fluorophore_state { active = 0, blink = 1, dark = 2, bleached = 3 };

inline constexpr int k_num_fluorophore_states = 4;

using Transition_matrix = std::array<std::array<double, k_num_fluorophore_states>, k_num_fluorophore_states>;

enum class Snr_definition {
  // mu_f / total background mean (Poisson and Gaussian components combined)
  background_mean,
  // mu_f / total background standard deviation
  background_std,
};

struct Sim_config {
  int n_fluorophores = 1;
  double mu_f = 1000.0;  // expected photons per frame from one active fluorophore
  double snr = 1.0;      // +inf disables the background
  Snr_definition snr_definition = Snr_definition::background_mean;
  // Expected blink and dark dwell, in simulation steps (microseconds).
  double dur_blink = 10.0;
  double dur_dark = 50.0;
  // Per-step exits from the active state.
  double p_ab = 0.0002;
  double p_ad = 0.0002;
  double p_ap = 0.0005;
  int steps_per_frame = 20;  // 20 us bins
  // Frames appended after the last photobleach, uniform on [min, max].
  int min_extra_frames = 5;
  int max_extra_frames = 50;
  // Probability that a fluorophore starts dark rather than active.
  double initial_dark_fraction = 0.0;
};

// Row-stochastic matrix over (active, blink, dark, bleached). Blink and dark
// states return only to active; bleached is absorbing. Throws when a row
// leaves [0, 1] or does not sum to one.
auto build_transition_matrix(const Sim_config& cfg) -> Transition_matrix;

auto next_state(const Transition_matrix& p, Fluorophore_state from, Rng& rng) -> Fluorophore_state;

// States visited in `steps` transitions, starting at `start` (inclusive).
auto simulate_state_path(const Transition_matrix& p, Fluorophore_state start, std::size_t steps, Rng& rng)
    -> std::vector<Fluorophore_state>;

// Per-frame background Poisson mean m; the frame background is
// Poisson(m) + Normal(m, m) with total mean and variance 2m.
auto background_component_mean(const Sim_config& cfg) -> double;

struct Ground_truth {
  std::vector<int> counts;             // rounded time-averaged active count per frame
  std::vector<double> change_points;   // frame boundaries where counts change (time units)
  std::vector<double> intensity;       // mu_f * counts
  Intensity_params params;             // mu_b = 0 after baseline subtraction
  std::vector<double> bleach_times;    // per fluorophore
  int n_fluorophores = 0;
};

struct Simulated_trace {
  Trace trace;
  Ground_truth truth;
};

// Steps each fluorophore's chain at one-microsecond resolution until it
// bleaches, draws Poisson emissions and the background per frame, subtracts
// the background mean 2m and truncates a uniform number of frames after the
// last bleach.
auto simulate_trace(const Sim_config& cfg, Rng& rng) -> Simulated_trace;

}  // namespace crj
