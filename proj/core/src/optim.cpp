#include "swarmnet/optim.hpp"

#include <cmath>

#include "swarmnet/errors.hpp"

namespace swarmnet::diff {

AdamState::AdamState(AdamConfig cfg, std::span<const Tensor> params) : config(cfg) {
  first_moment.reserve(params.size());
  second_moment.reserve(params.size());
  for (const auto& p : params) {
    first_moment.emplace_back(p.numel(), 0.0f);
    second_moment.emplace_back(p.numel(), 0.0f);
  }
}

void adam_step(std::span<Tensor> params, AdamState& state) {
  if (params.size() != state.first_moment.size()) {
    throw DimensionError("adam_step: " + std::to_string(params.size()) + " parameters but state for " +
                         std::to_string(state.first_moment.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].numel() != state.first_moment[i].size()) {
      throw DimensionError("adam_step: moment buffer does not match parameter " + std::to_string(i) +
                           " of shape " + to_string(params[i].shape()));
    }
    for (float g : params[i].grad())
      if (!std::isfinite(g)) throw PoisonedGradientError(state.step + 1);
  }
  const auto& c = state.config;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto grad = params[i].grad();
    if (grad.empty()) continue;
    auto value = params[i].mutable_values();
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    for (std::size_t j = 0; j < value.size(); ++j) {
      const double g = grad[j];
      const double mj = c.beta1 * m[j] + (1.0 - c.beta1) * g;
      const double vj = c.beta2 * v[j] + (1.0 - c.beta2) * g * g;
      m[j] = static_cast<float>(mj);
      v[j] = static_cast<float>(vj);
      const double update = c.lr * (mj / correction1) / (std::sqrt(vj / correction2) + c.eps);
      value[j] = static_cast<float>(value[j] - update);
    }
  }
}

void zero_grads(std::span<Tensor> params) {
  for (auto& p : params) p.zero_grad();
}

}  // namespace swarmnet::diff
