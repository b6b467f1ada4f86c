#pragma once

// Run configuration document with sections sim, model, train, noise and eval.
// Every field is optional; unknown keys are rejected. Serialization is
// canonical (sorted keys, shortest round-trip numbers) so the resolved
// document can be embedded in artifacts and compared byte for byte.

#include <filesystem>
#include <string>
#include <string_view>

#include "swarmnet/evalbench.hpp"
#include "swarmnet/model.hpp"
#include "swarmnet/rollout.hpp"
#include "swarmnet/swarmgen.hpp"
#include "swarmnet/trainer.hpp"

namespace swarmnet {

struct RunConfig {
  gen::ModelTag dataset = gen::ModelTag::boids;  // "sim.model"
  gen::SimConfig sim;
  model::SwarmNetConfig model;
  train::TrainConfig train;
  rollout::NoiseConfig noise;
  eval::EvalConfig eval;

  /// Derives the model's state and context widths from the simulator settings.
  void resolve();
  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

/// Parses, applies defaults for missing fields and resolves derived fields.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);
/// Canonical pretty-printed JSON of every field.
std::string to_json(const RunConfig& cfg);

}  // namespace swarmnet
