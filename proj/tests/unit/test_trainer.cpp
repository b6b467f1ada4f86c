#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "swarmnet/dataset.hpp"
#include "swarmnet/errors.hpp"
#include "swarmnet/ops.hpp"
#include "swarmnet/trainer.hpp"
#include "test_support.hpp"

using namespace swarmnet;
using namespace swarmnet::train;
using model::SwarmNetConfig;
using swarmnet::testing::random_tensor;
using swarmnet::testing::uniform_values;

namespace {

SwarmNetConfig tiny_model() {
  SwarmNetConfig cfg;
  cfg.conv_filters = 4;
  cfg.encoded_size = 4;
  cfg.mlp_hidden = {8};
  cfg.edge_size = 4;
  cfg.context_dim = 0;
  return cfg;
}

Episode random_episode(int steps, int agents, int context_dim, diff::Rng& rng) {
  Episode ep;
  ep.steps = steps;
  ep.agents = agents;
  ep.states = uniform_values(static_cast<std::size_t>(steps * agents * 4), rng);
  ep.context = uniform_values(static_cast<std::size_t>(context_dim), rng);
  return ep;
}

std::vector<Episode> chaser_set(int count, int steps) {
  gen::SimConfig sim;
  sim.steps = steps;
  return gen::make_dataset(gen::ModelTag::chaser, sim, count, 0);
}

std::vector<float> to_vector(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

}  // namespace

TEST(Windows, TrainableCounts) {
  EXPECT_EQ(trainable_windows(50, 7, 1), 43);
  EXPECT_EQ(trainable_windows(50, 7, 10), 34);
  EXPECT_EQ(trainable_windows(8, 7, 1), 1);
  try {
    trainable_windows(8, 7, 2);
    FAIL() << "expected HorizonError";
  } catch (const HorizonError& e) {
    EXPECT_EQ(e.max_feasible(), 1);
  }
  EXPECT_THROW(trainable_windows(50, 7, 0), ParameterError);
}

TEST(Windows, StackTilesEpisode) {
  diff::Rng rng(1);
  const auto ep = random_episode(50, 3, 5, rng);
  const auto batch = stack_windows(ep, 7, 3);
  const std::size_t count = 41, n = 3, tw = 7, c = 9;
  ASSERT_EQ(batch.windows.shape(), (diff::Shape{count, n, tw, c}));
  ASSERT_EQ(batch.targets.size(), 3u);
  for (std::size_t k = 0; k < count; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t tau = 0; tau < tw; ++tau) {
        for (std::size_t ch = 0; ch < 4; ++ch)
          EXPECT_EQ(batch.windows.values()[((k * n + i) * tw + tau) * c + ch],
                    ep.at(static_cast<int>(k + tau), static_cast<int>(i), static_cast<int>(ch)));
        for (std::size_t ch = 4; ch < c; ++ch)
          EXPECT_EQ(batch.windows.values()[((k * n + i) * tw + tau) * c + ch], ep.context[ch - 4]);
      }
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t ch = 0; ch < 4; ++ch)
          EXPECT_EQ(batch.targets[j].values()[(k * n + i) * 4 + ch],
                    ep.at(static_cast<int>(k + tw + j), static_cast<int>(i), static_cast<int>(ch)));
    }
  EXPECT_THROW(stack_windows(random_episode(9, 3, 5, rng), 7, 3), HorizonError);
}

TEST(Loss, Examples) {
  const std::vector<float> truth{1, 2, 3, 4};
  EXPECT_EQ(loss_eq4(truth, truth), 0.0);
  const std::vector<float> off{2, 3, 4, 5};
  EXPECT_EQ(loss_eq4(off, truth), 0.5);
  const auto t = loss_eq4(Tensor({1, 1, 4}, off), Tensor({1, 1, 4}, truth));
  EXPECT_EQ(t.item(), 0.5f);
  EXPECT_THROW(loss_eq4(std::vector<float>{1, 2}, truth), DimensionError);
}

TEST(Loss, QuadraticScalingAndScalarOracle) {
  diff::Rng rng(2);
  for (int rep = 0; rep < 10; ++rep) {
    const auto truth = uniform_values(60, rng);
    auto pred = uniform_values(60, rng);
    double acc = 0.0;
    for (std::size_t k = 0; k < 60; ++k) acc += std::pow(double(pred[k]) - truth[k], 2);
    const double oracle = acc / (2.0 * 4 * 5 * 3);
    const double l = loss_eq4(pred, truth);
    EXPECT_NEAR(l, oracle, 1e-7);
    EXPECT_NEAR(loss_eq4(Tensor({3, 5, 4}, pred), Tensor({3, 5, 4}, truth)).item(), oracle, 1e-6);
    std::vector<float> doubled(60);
    for (std::size_t k = 0; k < 60; ++k) doubled[k] = truth[k] + 2.0f * (pred[k] - truth[k]);
    EXPECT_NEAR(loss_eq4(doubled, truth), 4.0 * l, 1e-6 * (1 + l));
  }
}

TEST(NaturalSkip, StationaryIsUndefined) {
  Episode ep;
  ep.steps = 10;
  ep.agents = 2;
  ep.states.assign(10 * 2 * 4, 1.5f);
  EXPECT_THROW(natural_skip(ep), NormalizationUndefinedError);
}

TEST(NaturalSkip, ConstantVelocityAgent) {
  Episode ep;
  ep.steps = 6;
  ep.agents = 1;
  for (int t = 0; t < 6; ++t) ep.states.insert(ep.states.end(), {static_cast<float>(t), 0.0f, 1.0f, 0.0f});
  EXPECT_EQ(natural_skip(ep), 0.125);
  EXPECT_EQ(natural_skip(ep, 2, 4), 0.125);
  EXPECT_THROW(natural_skip(ep, 3, 3), ParameterError);
}

TEST(NaturalSkip, ScalarOracle) {
  diff::Rng rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const auto ep = random_episode(20, 5, 0, rng);
    double acc = 0.0;
    for (int t = 0; t + 1 < 20; ++t)
      for (int i = 0; i < 5; ++i)
        for (int c = 0; c < 4; ++c) acc += std::pow(double(ep.at(t + 1, i, c)) - ep.at(t, i, c), 2);
    EXPECT_NEAR(natural_skip(ep), acc / (2.0 * 4 * 5 * 19), 1e-7);
  }
}

TEST(NaturalSkip, CopyBaselineScoresOneOnMatchedTransitions) {
  for (auto tag : {gen::ModelTag::boids, gen::ModelTag::helbing, gen::ModelTag::chaser}) {
    const auto eps = gen::make_dataset(tag, gen::SimConfig{}, 4, 9);
    const model::CopyLastState copy(7, 4, eps[0].context.size());
    for (const auto& ep : eps) {
      const auto r = evaluate_batch(copy, stack_windows(ep, 7, 1));
      EXPECT_NEAR(r.L_norm, 1.0, 1e-12) << gen::to_string(tag);
      EXPECT_NEAR(r.L_bar, natural_skip(ep, 6, ep.steps - 1), 1e-12);
    }
  }
}

TEST(Unroll, SingleStepIsForwardLastWindow) {
  diff::Rng rng(4);
  SwarmNetConfig cfg;
  cfg.zero_init_output = false;
  const SwarmNet net(cfg, 4);
  const auto ep = random_episode(12, 3, 5, rng);
  const auto batch = stack_windows(ep, 7, 1);
  const auto preds = multistep_unroll(net, batch.windows, 1, nullptr);
  const auto fwd = net.forward(Tensor({12, 3, 4}, ep.states), ep.context, nullptr);
  ASSERT_EQ(preds.size(), 1u);
  // 5 trainable windows; forward has 6 positions, the last lacking a target
  for (std::size_t k = 0; k < 5 * 3 * 4; ++k) EXPECT_NEAR(preds[0].values()[k], fwd.values()[k], 1e-5);
  EXPECT_THROW(multistep_unroll(net, batch.windows, 0, nullptr), ParameterError);
}

TEST(Unroll, SecondStepConsumesPrediction) {
  diff::Rng rng(5);
  SwarmNetConfig cfg;
  cfg.zero_init_output = false;
  const SwarmNet net(cfg, 5);
  const auto ep = random_episode(20, 3, 5, rng);
  const auto batch = stack_windows(ep, 7, 2);
  const auto preds = multistep_unroll(net, batch.windows, 2, nullptr);
  const auto p1 = net.predict_next(batch.windows, nullptr);
  const auto fed = net.predict_next(model::shift_window(batch.windows, p1), nullptr);
  const auto forced = net.predict_next(model::shift_window(batch.windows, batch.targets[0]), nullptr);
  EXPECT_EQ(to_vector(preds[1]), to_vector(fed));
  EXPECT_NE(to_vector(preds[1]), to_vector(forced));
}

TEST(Unroll, ChainedSingleStepsMatchBitwise) {
  diff::Rng rng(6);
  SwarmNetConfig cfg;
  cfg.zero_init_output = false;
  cfg.dropout = 0.2;
  const SwarmNet net(cfg, 6);
  const auto batch = stack_windows(random_episode(20, 4, 5, rng), 7, 3);
  diff::Rng mask_a(9), mask_b(9);
  const auto full = multistep_unroll(net, batch.windows, 3, &mask_a);
  Tensor windows = batch.windows;
  for (int j = 0; j < 3; ++j) {
    const auto step = multistep_unroll(net, windows, 1, &mask_b);
    EXPECT_EQ(to_vector(step[0]), to_vector(full[j])) << "step " << j;
    windows = model::shift_window(windows, step[0]);
  }
}

TEST(Unroll, GradientFlowsThroughPredictions) {
  diff::Rng rng(7);
  SwarmNetConfig cfg;
  cfg.zero_init_output = false;
  const SwarmNet net(cfg, 7);
  const auto batch = stack_windows(random_episode(20, 3, 5, rng), 7, 2);
  const auto oldest_step_grad = [&](bool detach_between) {
    Tensor windows = Tensor::parameter(batch.windows.shape(), to_vector(batch.windows));
    diff::Tape tape;
    {
      diff::TapeScope scope(tape);
      Tensor p1 = net.predict_next(windows, nullptr);
      if (detach_between) p1 = p1.detach();
      Tensor p2 = net.predict_next(model::shift_window(windows, p1), nullptr);
      tape.backward(loss_eq4(p2, batch.targets[1]));
    }
    // the oldest step of each window leaves after one shift, so it reaches the
    // second prediction only through the first
    double norm = 0.0;
    const std::size_t tw = 7, c = 9;
    for (std::size_t r = 0; r < windows.dim(0) * windows.dim(1); ++r)
      for (std::size_t ch = 0; ch < c; ++ch) norm += std::abs(windows.grad()[(r * tw) * c + ch]);
    return norm;
  };
  EXPECT_GT(oldest_step_grad(false), 0.0);
  EXPECT_EQ(oldest_step_grad(true), 0.0);
}

TEST(Curriculum, LinearSchedule) {
  const auto s = CurriculumSchedule::linear(30, 10);
  EXPECT_EQ(s.epochs_per_increment, 3);
  std::vector<int> horizons;
  for (int e = 0; e < 30; ++e) horizons.push_back(s.horizon_at(e));
  std::vector<int> expected;
  for (int h = 1; h <= 10; ++h) expected.insert(expected.end(), 3, h);
  EXPECT_EQ(horizons, expected);
  EXPECT_EQ(CurriculumSchedule::linear(5, 10).horizon_at(4), 5);
  EXPECT_EQ(CurriculumSchedule::linear(100, 10).horizon_at(99), 10);
  TrainConfig cfg;
  cfg.epochs_per_increment = 2;
  EXPECT_EQ(cfg.schedule().horizon_at(5), 3);
}

TEST(Curriculum, LoggedHorizonsFollowSchedule) {
  auto data = chaser_set(6, 20);
  for (auto& ep : data) ep.context.clear();
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.epochs_per_increment = 3;
  cfg.batch_size = 4;
  cfg.windows_per_episode = 2;
  cfg.validation_horizon = 10;
  const auto result = train::train(data, tiny_model(), cfg);
  ASSERT_EQ(result.log.size(), 30u);
  for (std::size_t e = 0; e < 30; ++e) {
    EXPECT_EQ(result.log[e].horizon, static_cast<int>(e / 3) + 1);
    EXPECT_EQ(result.log[e].epoch, static_cast<int>(e) + 1);
    if (e > 0) EXPECT_GE(result.log[e].horizon, result.log[e - 1].horizon);
  }
}

TEST(Train, ResidualModelStartsAtCopyBaseline) {
  const auto data = chaser_set(3, 30);
  SwarmNetConfig cfg;
  cfg.context_dim = static_cast<int>(data[0].context.size());
  const SwarmNet net(cfg, 0);
  for (const auto& ep : data) {
    const auto r = evaluate_batch(net, stack_windows(ep, 7, 1));
    EXPECT_NEAR(r.L_norm, 1.0, 0.05);
  }
}

TEST(Train, ImprovesOnSmallChaserSet) {
  const auto data = chaser_set(100, 50);
  SwarmNetConfig model_cfg;
  model_cfg.context_dim = 0;
  TrainConfig cfg;
  cfg.curriculum = false;
  cfg.horizon = 1;
  cfg.epochs = 30;
  std::vector<Episode> stripped = data;
  for (auto& ep : stripped) ep.context.clear();
  const auto result = train::train(stripped, model_cfg, cfg);
  EXPECT_LT(result.log.back().train_Lnorm, result.log.front().train_Lnorm);
  EXPECT_LT(result.log.back().train_Lnorm, 0.5);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& row : result.log) best = std::min(best, row.val_Lnorm);
  EXPECT_EQ(result.best_val_Lnorm, best);
  const auto check = validation_loss(result.model, [&] {
    std::vector<Episode> v;
    for (auto i : result.split.validation) v.push_back(stripped[i]);
    return v;
  }(), 1);
  EXPECT_NEAR(check.L_norm, best, 1e-9);
}

TEST(Train, DeterministicLossCurves) {
  auto data = chaser_set(8, 20);
  for (auto& ep : data) ep.context.clear();
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.max_horizon = 3;
  cfg.batch_size = 3;
  cfg.windows_per_episode = 4;
  const auto a = train::train(data, tiny_model(), cfg);
  const auto b = train::train(data, tiny_model(), cfg);
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t e = 0; e < a.log.size(); ++e) {
    EXPECT_EQ(a.log[e].train_L, b.log[e].train_L);
    EXPECT_EQ(a.log[e].val_L, b.log[e].val_L);
    EXPECT_EQ(a.log[e].horizon, b.log[e].horizon);
  }
  EXPECT_EQ(a.split.validation, b.split.validation);
  cfg.seed = 2;
  const auto c = train::train(data, tiny_model(), cfg);
  EXPECT_NE(a.log.back().train_L, c.log.back().train_L);
}

TEST(Train, NonFiniteLossAborts) {
  auto data = chaser_set(4, 20);
  for (auto& ep : data) {
    ep.context.clear();
    for (int i = 0; i < ep.agents; ++i) ep.states[static_cast<std::size_t>((12 * ep.agents + i) * 4)] = std::numeric_limits<float>::quiet_NaN();
  }
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 1;
  try {
    train::train(data, tiny_model(), cfg);
    FAIL() << "expected TrainingAbortedError";
  } catch (const TrainingAbortedError& e) {
    EXPECT_EQ(e.epoch(), 1);
    EXPECT_EQ(e.batch(), 1);
  }
}

TEST(Train, RejectsMismatchedData) {
  const auto data = chaser_set(4, 20);
  TrainConfig cfg;
  cfg.epochs = 1;
  SwarmNetConfig wrong = tiny_model();
  wrong.context_dim = 3;
  EXPECT_THROW(train::train(data, wrong, cfg), ConfigError);
  auto short_data = chaser_set(4, 12);
  for (auto& ep : short_data) ep.context.clear();
  EXPECT_THROW(train::train(short_data, tiny_model(), cfg), HorizonError);
  cfg.batch_size = 0;
  EXPECT_THROW(train::train(data, tiny_model(), cfg), ConfigError);
}

TEST(Split, DisjointSeededAndNonEmpty) {
  const auto a = split_indices(100, 0.1, 3);
  EXPECT_EQ(a.validation.size(), 10u);
  EXPECT_EQ(a.train.size(), 90u);
  std::set<std::size_t> all(a.train.begin(), a.train.end());
  for (auto v : a.validation) EXPECT_TRUE(all.insert(v).second);
  EXPECT_EQ(all.size(), 100u);
  EXPECT_TRUE(std::is_sorted(a.validation.begin(), a.validation.end()));
  EXPECT_EQ(split_indices(100, 0.1, 3).validation, a.validation);
  EXPECT_NE(split_indices(100, 0.1, 4).validation, a.validation);
  const auto tiny = split_indices(2, 0.01, 0);
  EXPECT_EQ(tiny.validation.size(), 1u);
  EXPECT_EQ(tiny.train.size(), 1u);
  EXPECT_THROW(split_indices(1, 0.5, 0), ConfigError);
}

TEST(Validation, PoolsAcrossEpisodes) {
  const auto data = chaser_set(20, 30);
  SwarmNetConfig cfg;
  cfg.context_dim = 0;
  cfg.zero_init_output = false;
  std::vector<Episode> eps = data;
  for (auto& ep : eps) ep.context.clear();
  const SwarmNet net(cfg, 1);
  const auto pooled = validation_loss(net, eps, 2);
  double sum_l = 0.0, sum_lbar = 0.0;
  std::size_t steps = 0;
  for (const auto& ep : eps) {
    const auto r = evaluate_batch(net, stack_windows(ep, 7, 2));
    sum_l += r.L * r.steps;
    sum_lbar += r.L_bar * r.steps;
    steps += r.steps;
  }
  EXPECT_EQ(pooled.steps, steps);
  EXPECT_NEAR(pooled.L, sum_l / steps, 1e-9 * sum_l / steps);
  EXPECT_NEAR(pooled.L_norm, sum_l / sum_lbar, 1e-6 * sum_l / sum_lbar);
}

TEST(Config, Validation) {
  TrainConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.final_horizon(), 10);
  EXPECT_EQ(cfg.effective_validation_horizon(), 10);
  cfg.curriculum = false;
  cfg.horizon = 3;
  EXPECT_EQ(cfg.final_horizon(), 3);
  cfg.validation_fraction = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.adam.lr = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Log, CsvFormat) {
  std::vector<EpochLog> log{{1, 1, 0.5, 1.0, 0.25, 0.75, 1.5}, {2, 2, 0.125, 0.5, 0.0625, 0.25, 2.0}};
  const auto csv = training_log_csv(log);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "epoch,horizon,train_L,train_Lnorm,val_L,val_Lnorm,seconds");
  std::getline(in, line);
  EXPECT_EQ(line, "1,1,0.5,1,0.25,0.75,1.5");
  std::getline(in, line);
  EXPECT_EQ(line, "2,2,0.125,0.5,0.0625,0.25,2");
  const auto dir = swarmnet::testing::temp_dir("trainlog");
  write_training_log((dir / "log.csv").string(), log);
  std::ifstream f(dir / "log.csv");
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), csv);
}
