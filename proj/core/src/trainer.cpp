#include "swarmnet/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "binary_io.hpp"
#include "swarmnet/errors.hpp"
#include "swarmnet/ops.hpp"
#include "text.hpp"

namespace swarmnet::train {

namespace {

diff::Rng stream_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return diff::Rng(seq);
}

constexpr std::uint32_t kShuffleStream = 3;
constexpr std::uint32_t kDropoutStream = 4;
constexpr std::uint32_t kSplitStream = 5;

// Squared distance between consecutive ground-truth states, summed over one frame.
double frame_skip(const Episode& ep, int t) {
  const std::size_t frame = static_cast<std::size_t>(ep.agents) * ep.state_dim;
  const float* a = ep.states.data() + static_cast<std::size_t>(t) * frame;
  const float* b = a + frame;
  double acc = 0.0;
  for (std::size_t k = 0; k < frame; ++k) {
    const double d = static_cast<double>(b[k]) - static_cast<double>(a[k]);
    acc += d * d;
  }
  return acc;
}

void check_dataset(std::span<const Episode> dataset, const model::SwarmNetConfig& m) {
  if (dataset.empty()) throw ConfigError("training needs at least one episode");
  const int agents = dataset.front().agents;
  for (const auto& ep : dataset) {
    if (ep.agents != agents) throw ConfigError("episodes disagree on the agent count");
    if (ep.state_dim != m.state_dim) {
      throw ConfigError("episode state dimension " + std::to_string(ep.state_dim) +
                        " but model expects " + std::to_string(m.state_dim));
    }
    if (static_cast<int>(ep.context.size()) != m.context_dim) {
      throw ConfigError("episode context dimension " + std::to_string(ep.context.size()) +
                        " but model expects " + std::to_string(m.context_dim));
    }
  }
}

}  // namespace

CurriculumSchedule CurriculumSchedule::linear(int epochs, int max_horizon) {
  CurriculumSchedule s;
  s.max_horizon = max_horizon;
  const int increments = std::max(1, max_horizon - s.start_horizon + 1);
  s.epochs_per_increment = std::max(1, (epochs + increments - 1) / increments);
  return s;
}

int CurriculumSchedule::horizon_at(int epoch) const {
  return std::min(max_horizon, start_horizon + epoch / std::max(1, epochs_per_increment));
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("train.validation_fraction must lie in (0, 1)");
  }
  if (max_horizon < 1 || horizon < 1) throw ConfigError("train horizons must be >= 1");
  if (epochs_per_increment < 0 || validation_horizon < 0 || windows_per_episode < 0) {
    throw ConfigError("train.epochs_per_increment, validation_horizon and windows_per_episode must be >= 0");
  }
  if (!(adam.lr > 0.0) || !(adam.beta1 >= 0.0 && adam.beta1 < 1.0) ||
      !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) || !(adam.eps > 0.0)) {
    throw ConfigError("train.adam: need lr > 0, betas in [0, 1), eps > 0");
  }
}

CurriculumSchedule TrainConfig::schedule() const {
  CurriculumSchedule s = CurriculumSchedule::linear(epochs, max_horizon);
  if (epochs_per_increment > 0) s.epochs_per_increment = epochs_per_increment;
  return s;
}

int trainable_windows(int steps, int window_length, int horizon) {
  if (horizon < 1) throw ParameterError("horizon must be >= 1");
  const int count = steps - window_length - horizon + 1;
  if (count < 1) {
    throw HorizonError("horizon " + std::to_string(horizon) + " too long for a " + std::to_string(steps) +
                           "-step episode with window " + std::to_string(window_length) +
                           "; at most " + std::to_string(steps - window_length),
                       steps - window_length);
  }
  return count;
}

WindowBatch stack_windows(const Episode& ep, int window_length, int horizon) {
  const int count = trainable_windows(ep.steps, window_length, horizon);
  std::vector<WindowRef> refs(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) refs[static_cast<std::size_t>(k)] = {0, k};
  return stack_windows(std::span<const Episode>(&ep, 1), refs, window_length, horizon);
}

WindowBatch stack_windows(std::span<const Episode> episodes, std::span<const WindowRef> refs,
                          int window_length, int horizon) {
  if (refs.empty()) throw ParameterError("stack_windows: no windows selected");
  const Episode& first = episodes[refs.front().episode];
  const std::size_t n = static_cast<std::size_t>(first.agents);
  const std::size_t d = static_cast<std::size_t>(first.state_dim);
  const std::size_t c = d + first.context.size();
  const std::size_t tw = static_cast<std::size_t>(window_length);
  const std::size_t b = refs.size();
  const std::size_t frame = n * d;

  std::vector<float> windows(b * n * tw * c);
  std::vector<std::vector<float>> targets(static_cast<std::size_t>(horizon), std::vector<float>(b * frame));
  double skip = 0.0;
  float* dst = windows.data();
  for (std::size_t r = 0; r < b; ++r) {
    const Episode& ep = episodes[refs[r].episode];
    if (static_cast<std::size_t>(ep.agents) != n || static_cast<std::size_t>(ep.state_dim) != d ||
        ep.context.size() + d != c) {
      throw DimensionError("stack_windows: episodes in one batch must share N, D and d_c");
    }
    const int start = refs[r].start;
    trainable_windows(ep.steps - start, window_length, horizon);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t tau = 0; tau < tw; ++tau) {
        const std::size_t t = static_cast<std::size_t>(start) + tau;
        const float* src = ep.states.data() + (t * n + i) * d;
        dst = std::copy_n(src, d, dst);
        dst = std::copy(ep.context.begin(), ep.context.end(), dst);
      }
    }
    for (int j = 0; j < horizon; ++j) {
      const int t = start + window_length + j;
      const float* src = ep.states.data() + static_cast<std::size_t>(t) * frame;
      std::copy_n(src, frame, targets[static_cast<std::size_t>(j)].data() + r * frame);
      skip += frame_skip(ep, t - 1);
    }
  }
  WindowBatch out;
  out.windows = Tensor({b, n, tw, c}, std::move(windows));
  for (auto& t : targets) out.targets.emplace_back(diff::Shape{b, n, d}, std::move(t));
  out.natural_skip = skip / (2.0 * static_cast<double>(b * frame) * horizon);
  return out;
}

Tensor loss_eq4(const Tensor& pred, const Tensor& truth) {
  return diff::scale(diff::mse(pred, truth), 0.5f);
}

double loss_eq4(std::span<const float> pred, std::span<const float> truth) {
  if (pred.size() != truth.size() || pred.empty()) {
    throw DimensionError("loss_eq4: " + std::to_string(pred.size()) + " predictions vs " +
                         std::to_string(truth.size()) + " targets");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double d = static_cast<double>(pred[k]) - static_cast<double>(truth[k]);
    acc += d * d;
  }
  return acc / (2.0 * static_cast<double>(pred.size()));
}

double natural_skip(const Episode& ep) { return natural_skip(ep, 0, ep.steps - 1); }

double natural_skip(const Episode& ep, int first, int last) {
  if (ep.steps < 2 || first < 0 || last > ep.steps - 1 || first >= last) {
    throw ParameterError("natural_skip: need at least one transition inside the episode");
  }
  double acc = 0.0;
  for (int t = first; t < last; ++t) acc += frame_skip(ep, t);
  const double lbar = acc / (2.0 * ep.agents * ep.state_dim * (last - first));
  if (!(lbar > 0.0)) throw NormalizationUndefinedError();
  return lbar;
}

std::vector<Tensor> multistep_unroll(const StepPredictor& model, Tensor windows, int horizon,
                                     diff::Rng* dropout_rng,
                                     const std::function<Tensor(const Tensor&)>& perturb) {
  if (horizon < 1) throw ParameterError("multistep_unroll: horizon must be >= 1");
  std::vector<Tensor> preds;
  preds.reserve(static_cast<std::size_t>(horizon));
  for (int j = 0; j < horizon; ++j) {
    Tensor next = model.predict_next(perturb ? perturb(windows) : windows, dropout_rng);
    if (j + 1 < horizon) windows = model::shift_window(windows, next);
    preds.push_back(std::move(next));
  }
  return preds;
}

LossReport evaluate_batch(const StepPredictor& model, const WindowBatch& batch) {
  diff::NoTapeScope no_tape;
  const int horizon = static_cast<int>(batch.targets.size());
  auto preds = multistep_unroll(model, batch.windows, horizon, nullptr);
  LossReport r;
  r.horizon = horizon;
  r.steps = batch.windows.dim(0) * static_cast<std::size_t>(horizon);
  double acc = 0.0;
  for (int j = 0; j < horizon; ++j) acc += loss_eq4(preds[j].values(), batch.targets[j].values());
  r.L = acc / horizon;
  r.L_bar = batch.natural_skip;
  r.L_norm = r.L_bar > 0.0 ? r.L / r.L_bar : 0.0;
  return r;
}

Split split_indices(std::size_t count, double validation_fraction, std::uint64_t seed) {
  if (count < 2) throw ConfigError("a train/validation split needs at least two episodes");
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = stream_rng(seed, kSplitStream);
  std::shuffle(order.begin(), order.end(), rng);
  auto n_val = static_cast<std::size_t>(std::llround(validation_fraction * static_cast<double>(count)));
  n_val = std::clamp<std::size_t>(n_val, 1, count - 1);
  Split s;
  s.validation.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(s.validation.begin(), s.validation.end());
  return s;
}

LossReport validation_loss(const StepPredictor& model, std::span<const Episode> episodes, int horizon) {
  constexpr std::size_t kChunk = 16;
  LossReport total;
  total.horizon = horizon;
  double sum_l = 0.0, sum_lbar = 0.0;
  for (std::size_t lo = 0; lo < episodes.size(); lo += kChunk) {
    const std::size_t hi = std::min(episodes.size(), lo + kChunk);
    std::vector<WindowRef> refs;
    for (std::size_t e = lo; e < hi; ++e) {
      const int k = trainable_windows(episodes[e].steps, model.window_length(), horizon);
      for (int s = 0; s < k; ++s) refs.push_back({e, s});
    }
    const auto batch = stack_windows(episodes, refs, model.window_length(), horizon);
    const auto r = evaluate_batch(model, batch);
    sum_l += r.L * static_cast<double>(r.steps);
    sum_lbar += r.L_bar * static_cast<double>(r.steps);
    total.steps += r.steps;
  }
  total.L = sum_l / static_cast<double>(total.steps);
  total.L_bar = sum_lbar / static_cast<double>(total.steps);
  total.L_norm = total.L_bar > 0.0 ? total.L / total.L_bar : 0.0;
  return total;
}

TrainResult train(std::span<const Episode> dataset, const model::SwarmNetConfig& model_cfg,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  model_cfg.validate();
  check_dataset(dataset, model_cfg);
  const int tw = model_cfg.window_length();
  const int val_h = cfg.effective_validation_horizon();
  for (const auto& ep : dataset) {
    trainable_windows(ep.steps, tw, std::max(cfg.final_horizon(), val_h));
  }

  Split split = split_indices(dataset.size(), cfg.validation_fraction, cfg.seed);
  std::vector<Episode> val_set;
  for (auto i : split.validation) val_set.push_back(dataset[i]);

  SwarmNet net(model_cfg, cfg.seed);
  auto params = net.parameters();
  diff::AdamState adam(cfg.adam, params);
  auto shuffle_rng = stream_rng(cfg.seed, kShuffleStream);
  auto dropout_rng = stream_rng(cfg.seed, kDropoutStream);
  const CurriculumSchedule schedule = cfg.schedule();

  std::vector<EpochLog> log;
  std::optional<SwarmNet> best;
  int best_epoch = 0;
  double best_score = 0.0;
  std::vector<std::size_t> order = split.train;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const int h = cfg.curriculum ? schedule.horizon_at(epoch) : cfg.horizon;
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double sum_l = 0.0, sum_lbar = 0.0;
    std::size_t steps = 0;
    int batch_index = 0;
    for (std::size_t lo = 0; lo < order.size(); lo += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t hi = std::min(order.size(), lo + static_cast<std::size_t>(cfg.batch_size));
      std::vector<WindowRef> refs;
      for (std::size_t e = lo; e < hi; ++e) {
        const std::size_t idx = order[e];
        const int k = trainable_windows(dataset[idx].steps, tw, h);
        std::vector<int> starts(static_cast<std::size_t>(k));
        std::iota(starts.begin(), starts.end(), 0);
        if (cfg.windows_per_episode > 0 && cfg.windows_per_episode < k) {
          std::vector<int> picked;
          std::sample(starts.begin(), starts.end(), std::back_inserter(picked),
                      cfg.windows_per_episode, shuffle_rng);
          starts = std::move(picked);
        }
        for (int s : starts) refs.push_back({idx, s});
      }
      const auto batch = stack_windows(dataset, refs, tw, h);

      diff::Tape tape;
      Tensor loss;
      {
        diff::TapeScope scope(tape);
        auto preds = multistep_unroll(net, batch.windows, h, &dropout_rng);
        for (int j = 0; j < h; ++j) {
          Tensor term = loss_eq4(preds[j], batch.targets[j]);
          loss = loss.defined() ? diff::add(loss, term) : term;
        }
        if (h > 1) loss = diff::scale(loss, 1.0f / static_cast<float>(h));
      }
      const double l = loss.item();
      if (!std::isfinite(l)) throw TrainingAbortedError(epoch + 1, batch_index + 1);
      tape.backward(loss);
      diff::adam_step(params, adam);
      diff::zero_grads(params);

      const auto n = refs.size() * static_cast<std::size_t>(h);
      sum_l += l * static_cast<double>(n);
      sum_lbar += batch.natural_skip * static_cast<double>(n);
      steps += n;
      ++batch_index;
    }

    const LossReport val = validation_loss(net, val_set, val_h);
    EpochLog row;
    row.epoch = epoch + 1;
    row.horizon = h;
    row.train_L = sum_l / static_cast<double>(steps);
    row.train_Lnorm = sum_lbar > 0.0 ? sum_l / sum_lbar : 0.0;
    row.val_L = val.L;
    row.val_Lnorm = val.L_norm;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log.push_back(row);
    if (on_epoch) on_epoch(row);

    const double score = val.normalized() ? val.L_norm : val.L;
    if (!best || score < best_score) {
      best = net.clone();
      best_score = score;
      best_epoch = row.epoch;
    }
  }

  TrainResult result{std::move(*best), std::move(log), std::move(split), best_epoch, 0.0};
  result.best_val_Lnorm = result.log[static_cast<std::size_t>(best_epoch - 1)].val_Lnorm;
  return result;
}

std::string training_log_csv(std::span<const EpochLog> log) {
  using detail::num;
  std::ostringstream out;
  out << "epoch,horizon,train_L,train_Lnorm,val_L,val_Lnorm,seconds\n";
  for (const auto& r : log) {
    out << r.epoch << ',' << r.horizon << ',' << num(r.train_L) << ',' << num(r.train_Lnorm) << ','
        << num(r.val_L) << ',' << num(r.val_Lnorm) << ',' << num(r.seconds) << '\n';
  }
  return out.str();
}

void write_training_log(const std::string& path, std::span<const EpochLog> log) {
  detail::write_file(path, training_log_csv(log));
}

}  // namespace swarmnet::train
