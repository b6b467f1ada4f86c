#pragma once

// Desk-scale experiment harness: horizon losses on held-out episodes, an
// ablation table over encoder/context/curriculum variants, and sample-size
// sweeps. Losses are reported as mean and sample standard deviation over test
// episodes.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "swarmnet/model.hpp"
#include "swarmnet/swarmgen.hpp"
#include "swarmnet/trainer.hpp"

namespace swarmnet::eval {

using gen::Episode;
using model::StepPredictor;

struct EvalConfig {
  std::vector<int> horizons{5, 40};
  std::vector<int> sweep_sizes{1000, 2000, 5000};
  int sweep_seeds = 1;
  int histogram_bins = 20;
  int histogram_step = 30;  // 1-based prediction step of the histogram snapshot
  int jobs = 1;

  void validate() const;
  friend bool operator==(const EvalConfig&, const EvalConfig&) = default;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single value
};
MeanStd mean_std(std::span<const double> values);

struct HorizonStats {
  int horizon = 0;
  double L = 0.0;  // mean raw loss over episodes
  double Lnorm_mean = 0.0;
  double Lnorm_std = 0.0;
  std::size_t normalized_episodes = 0;  // episodes with a defined L_norm
};

struct EvalReport {
  std::string dataset;
  std::string variant;
  std::uint64_t seed = 0;
  std::vector<HorizonStats> rows;
  std::size_t episodes = 0;
  double seconds = 0.0;
  std::string failure;  // non-empty when the variant could not be trained or evaluated

  const HorizonStats* at(int horizon) const;
};

/// Per-episode losses of one rollout from the start of each episode.
struct EpisodeLosses {
  std::vector<double> L;      // [episode]
  std::vector<double> Lnorm;  // [episode]; NaN where the natural skip is zero
};
/// One entry per horizon. The model sees the first `observed` ground-truth
/// states (0: its window length; a longer prefix feeds it the latest T_w of
/// them) so predictors with different windows are scored on the same steps.
std::vector<EpisodeLosses> episode_losses(const StepPredictor& model, std::span<const Episode> test,
                                          std::span<const int> horizons, int observed = 0);

/// Unrolls each test episode from its first ground-truth states and scores
/// every horizon against the truth, normalized by the episode's natural skip.
EvalReport evaluate(const StepPredictor& model, std::span<const Episode> test, std::span<const int> horizons,
                    const std::string& dataset, const std::string& variant, std::uint64_t seed = 0,
                    int observed = 0);

/// Copy-last-state predictor on every one-step transition after the first
/// window, normalized by the natural skip of exactly those transitions: L_norm = 1.
EvalReport calibration(std::span<const Episode> test, int window_length, const std::string& dataset);

/// Throws ConfigError if any test episode seed also occurs in the training set.
void audit_disjoint(std::span<const Episode> train, std::span<const Episode> test);

struct VariantSpec {
  std::string name;
  model::TemporalEncoder encoder = model::TemporalEncoder::conv1d;
  bool use_context = true;
  bool curriculum = true;
};

/// decoder, decoder(context), decoder+conv1d, decoder+conv1d(context), swarmnet(context).
std::vector<VariantSpec> ablation_variants();
VariantSpec find_variant(const std::string& name);
/// Variants without curriculum train at a fixed horizon equal to the curriculum's maximum.
void apply_variant(const VariantSpec& v, model::SwarmNetConfig& m, train::TrainConfig& t);

struct AblationInput {
  std::span<const Episode> train;
  std::span<const Episode> test;
  model::SwarmNetConfig model;
  train::TrainConfig train_cfg;
  std::vector<int> horizons;
  std::string dataset;
  int jobs = 1;
};

/// Calibration row, copy baseline, then one row per variant (identical seeds, splits, epochs).
std::vector<EvalReport> ablation_suite(const AblationInput& in, std::span<const VariantSpec> variants);

struct SweepSpec {
  std::vector<int> sizes;
  std::vector<int> horizons;
  int seeds = 1;
  void validate() const;
};

using DatasetFactory = std::function<std::vector<Episode>(int count, std::uint64_t base_seed)>;

/// One trained model per (size, seed), evaluated at every horizon on a shared test set.
std::vector<EvalReport> sample_size_sweep(const SweepSpec& spec, const DatasetFactory& make,
                                          std::uint64_t base_seed, std::span<const Episode> test,
                                          const model::SwarmNetConfig& model_cfg,
                                          const train::TrainConfig& train_cfg, const std::string& dataset,
                                          int jobs = 1);

/// `dataset,variant,horizon,seed,L,Lnorm_mean,Lnorm_std,episodes,seconds`, one row per report and horizon.
std::string report_csv(std::span<const EvalReport> reports);
/// Fixed-width table with one row per report and one mean +- std column per horizon.
std::string report_table(std::span<const EvalReport> reports);

/// One-sided sign test: probability of at least `wins` successes in `trials` fair coin flips.
double sign_test_p(int wins, int trials);

/// Runs task(i) for i in [0, count) on at most `jobs` threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task);

}  // namespace swarmnet::eval
