#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "swarmnet/tensor.hpp"

namespace swarmnet::diff {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

struct AdamState {
  AdamConfig config;
  std::vector<std::vector<float>> first_moment;
  std::vector<std::vector<float>> second_moment;
  std::int64_t step = 0;

  AdamState() = default;
  AdamState(AdamConfig cfg, std::span<const Tensor> params);
};

/// One bias-corrected Adam update using the gradients stored on `params`.
/// Throws PoisonedGradientError (carrying the would-be step index) and leaves
/// parameters untouched if any gradient is non-finite.
void adam_step(std::span<Tensor> params, AdamState& state);

void zero_grads(std::span<Tensor> params);

}  // namespace swarmnet::diff
