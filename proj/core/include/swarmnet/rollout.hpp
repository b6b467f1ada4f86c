#pragma once

// Inference with a trained predictor: deterministic long-horizon rollouts,
// stochastic sampling with test-time dropout and input noise, and closed-loop
// control of a point-mass swarm by predicted velocities.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "swarmnet/model.hpp"
#include "swarmnet/swarmgen.hpp"

namespace swarmnet::rollout {

using diff::Tensor;
using model::StepPredictor;
using model::SwarmNet;

struct NoiseConfig {
  double dropout = 0.0;
  double sigma = 0.0;  // std of additive normal noise on every state input
  int samples = 1;
  std::uint64_t seed = 1;

  void validate() const;
  friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

enum class RolloutMode { deterministic, stochastic };

struct RolloutResult {
  RolloutMode mode = RolloutMode::deterministic;
  int horizon = 0;
  int agents = 0;
  int state_dim = 0;
  std::vector<float> predicted;   // [h, N, D]; the sample mean in stochastic mode
  std::vector<float> samples;     // [S, h, N, D]; stochastic only
  std::vector<float> dispersion;  // [h, N, D] population std across samples; stochastic only
  std::vector<std::string> warnings;

  int sample_count() const;
  float sample(int s, int t, int agent, int channel) const;
  float at(int t, int agent, int channel) const;
  /// Mean over agents of the positional dispersion |(sd_x, sd_y)| at step t.
  double mean_position_dispersion(int t) const;
};

/// seed_window is [T_w, N, D] (time-major) and must match the model's window length.
RolloutResult predict(const StepPredictor& model, std::span<const float> seed_window, int agents,
                      std::span<const float> context, int horizon);

/// S stochastic rollouts, one after another: every forward draws fresh dropout
/// masks and adds N(0, sigma^2) to the state channels of the window.
RolloutResult sample_plus(const SwarmNet& model, std::span<const float> seed_window, int agents,
                          std::span<const float> context, int horizon, const NoiseConfig& noise);

struct Histogram {
  int agent = 0;
  char axis = 'x';
  std::vector<double> edges;   // bins + 1 ascending bin boundaries
  std::vector<double> masses;  // sums to 1
};

/// Per-agent x/y histograms of sampled positions at step t (0-based into the horizon).
/// Needs at least 30 samples. A zero-width range widens to +-0.5 around the value.
std::vector<Histogram> marginal_histograms(const RolloutResult& result, int step, int bins);

/// Sarle's bimodality coefficient (g^2 + 1) / (kappa + 3 (n-1)^2 / ((n-2)(n-3))).
/// Values above 5/9 (the uniform distribution's) hint at bi- or multimodality.
double bimodality_coefficient(std::span<const double> values);

struct PlantConfig {
  double dt = 0.1;
  double max_speed = 2.0;
  double arena_half_width = 10.0;
};

struct CloneResult {
  gen::Episode executed;  // steps + 1 realized frames, initial state first
};

/// Called once per control step with the window fed to the model and the
/// realized frame [N, D] it was built from (the newest window row).
using CloneObserver = std::function<void(int step, const Tensor& window, std::span<const float> realized)>;

/// Closed loop: predicted velocities become commands for point-mass agents,
/// which integrate position += v * dt under the speed cap. The window starts as
/// the initial state held T_w times. Throws RolloutDivergedError when an agent
/// leaves five times the arena.
CloneResult clone_swarm(const StepPredictor& model, std::span<const gen::AgentState> initial,
                        std::span<const float> context, int steps, const PlantConfig& plant,
                        const CloneObserver& observer = {});

std::string rollout_csv(const RolloutResult& result);
std::string histogram_csv(std::span<const Histogram> histograms);
/// Same columns as rollout_csv for an executed trajectory (sample 0).
std::string trajectory_csv(const gen::Episode& ep);

}  // namespace swarmnet::rollout
