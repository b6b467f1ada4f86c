#pragma once

// Supervised training on shifted windows with the scaled MSE loss, the
// natural-skip normalization and a 1 -> 10 step curriculum.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarmnet/model.hpp"
#include "swarmnet/optim.hpp"
#include "swarmnet/swarmgen.hpp"

namespace swarmnet::train {

using diff::Tensor;
using gen::Episode;
using model::StepPredictor;
using model::SwarmNet;

struct LossReport {
  double L = 0.0;
  double L_bar = 0.0;
  double L_norm = 0.0;  // meaningful only when L_bar > 0
  int horizon = 1;
  std::size_t steps = 0;  // predicted (window, step) pairs

  bool normalized() const { return L_bar > 0.0; }
};

struct CurriculumSchedule {
  int start_horizon = 1;
  int max_horizon = 10;
  int epochs_per_increment = 1;

  /// Linear schedule reaching max_horizon in ten increments: +1 every ceil(epochs / 10) epochs.
  static CurriculumSchedule linear(int epochs, int max_horizon = 10);
  /// Horizon for a 0-based epoch index.
  int horizon_at(int epoch) const;
};

struct TrainConfig {
  int epochs = 30;
  int batch_size = 8;  // episodes per gradient step
  diff::AdamConfig adam;
  std::uint64_t seed = 1;
  double validation_fraction = 0.1;
  bool curriculum = true;
  int max_horizon = 10;
  int horizon = 1;               // fixed horizon without curriculum
  int epochs_per_increment = 0;  // 0: ceil(epochs / 10)
  int validation_horizon = 0;    // 0: the largest horizon trained on
  int windows_per_episode = 0;   // windows drawn per episode and epoch; 0: all

  void validate() const;
  CurriculumSchedule schedule() const;
  int final_horizon() const { return curriculum ? max_horizon : horizon; }
  int effective_validation_horizon() const {
    return validation_horizon > 0 ? validation_horizon : final_horizon();
  }
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Windows of one or more episodes with their multistep targets.
struct WindowBatch {
  Tensor windows;               // [B, N, T_w, D + d_c]
  std::vector<Tensor> targets;  // horizon entries of [B, N, D]
  double natural_skip = 0.0;    // natural-skip loss over exactly the target transitions
};

/// Number of windows of an episode with targets for `horizon` steps: T - T_w - h + 1.
/// Throws HorizonError naming the largest feasible horizon.
int trainable_windows(int steps, int window_length, int horizon);

/// All trainable windows of an episode. Window k covers steps k..k+T_w-1 and its
/// j-th target is state k+T_w-1+j.
WindowBatch stack_windows(const Episode& ep, int window_length, int horizon);

/// Selected windows (episode index into `episodes`, window start) as one batch.
struct WindowRef {
  std::size_t episode = 0;
  int start = 0;
};
WindowBatch stack_windows(std::span<const Episode> episodes, std::span<const WindowRef> refs,
                          int window_length, int horizon);

/// L = 1/(2 D N T_s) sum |s - s*|^2, i.e. half the mean squared error. Differentiable.
Tensor loss_eq4(const Tensor& pred, const Tensor& truth);
double loss_eq4(std::span<const float> pred, std::span<const float> truth);

/// L-bar over the whole episode. Throws NormalizationUndefinedError when zero.
double natural_skip(const Episode& ep);
/// L-bar over transitions t -> t+1 for t in [first, last). Throws when zero.
double natural_skip(const Episode& ep, int first, int last);

/// Predictions for h successive steps; step j consumes steps < j's predictions,
/// never ground truth. `perturb`, when set, is applied to the window before every step.
std::vector<Tensor> multistep_unroll(const StepPredictor& model, Tensor windows, int horizon,
                                     diff::Rng* dropout_rng,
                                     const std::function<Tensor(const Tensor&)>& perturb = {});

/// Pooled loss of a batch at its horizon, without gradient tracking.
LossReport evaluate_batch(const StepPredictor& model, const WindowBatch& batch);

struct EpochLog {
  int epoch = 0;  // 1-based
  int horizon = 1;
  double train_L = 0.0;
  double train_Lnorm = 0.0;
  double val_L = 0.0;
  double val_Lnorm = 0.0;
  double seconds = 0.0;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Seeded shuffle of episode indices; at least one episode lands on each side.
Split split_indices(std::size_t count, double validation_fraction, std::uint64_t seed);

struct TrainResult {
  SwarmNet model;  // best validation checkpoint
  std::vector<EpochLog> log;
  Split split;
  int best_epoch = 0;
  double best_val_Lnorm = 0.0;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Throws ConfigError on dataset/model mismatch, HorizonError when episodes are
/// too short and TrainingAbortedError on a non-finite loss.
TrainResult train(std::span<const Episode> dataset, const model::SwarmNetConfig& model_cfg,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = {});

/// Loss of `model` on the given episodes at a horizon, over all windows.
LossReport validation_loss(const StepPredictor& model, std::span<const Episode> episodes, int horizon);

void write_training_log(const std::string& path, std::span<const EpochLog> log);
std::string training_log_csv(std::span<const EpochLog> log);

}  // namespace swarmnet::train
