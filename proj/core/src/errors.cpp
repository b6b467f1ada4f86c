#include "swarmnet/errors.hpp"

namespace swarmnet {

PoisonedGradientError::PoisonedGradientError(std::int64_t step)
    : NumericError("non-finite gradient at optimizer step " + std::to_string(step), step) {}

PoisonedModelError::PoisonedModelError(const std::string& tensor_name)
    : NumericError("non-finite parameter in tensor '" + tensor_name + "'", -1) {}

SimulationDivergedError::SimulationDivergedError(std::int64_t step)
    : NumericError("simulation diverged (non-finite state) at step " + std::to_string(step), step) {}

RolloutDivergedError::RolloutDivergedError(std::int64_t step)
    : NumericError("closed-loop rollout diverged at step " + std::to_string(step), step) {}

TrainingAbortedError::TrainingAbortedError(int epoch, int batch)
    : NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                       std::to_string(batch),
                   epoch),
      epoch_(epoch),
      batch_(batch) {}

}  // namespace swarmnet
