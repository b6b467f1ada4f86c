#include <gtest/gtest.h>

#include <fstream>

#include "swarmnet/errors.hpp"
#include "swarmnet/run_config.hpp"
#include "test_support.hpp"

using namespace swarmnet;

namespace {

void expect_config_error(const std::string& text, const std::string& fragment) {
  try {
    parse_run_config(text);
    FAIL() << "expected ConfigError for " << text;
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(RunConfig, EmptyDocumentGivesDefaults) {
  const auto cfg = parse_run_config("{}");
  EXPECT_EQ(cfg.dataset, gen::ModelTag::boids);
  EXPECT_EQ(cfg.sim.steps, 50);
  EXPECT_EQ(cfg.model.conv_layers, 3);
  EXPECT_EQ(cfg.model.mlp_hidden, (std::vector<int>{64, 64}));
  EXPECT_EQ(cfg.model.context_dim, 5);
  EXPECT_EQ(cfg.model.state_dim, 4);
  EXPECT_EQ(cfg.eval.horizons, (std::vector<int>{5, 40}));
  EXPECT_EQ(cfg.train.max_horizon, 10);
}

TEST(RunConfig, RoundTripIsIdentity) {
  const auto defaults = to_json(parse_run_config("{}"));
  EXPECT_EQ(to_json(parse_run_config(defaults)), defaults);
  const std::string custom = R"({
    "sim": {"model": "chaser", "steps": 80, "agents": 7, "dt": 0.05, "max_obstacles": 2,
            "chaser": {"speed": 1.25}},
    "model": {"kernel_size": 2, "mlp_hidden": [16, 8, 4], "temporal_encoder": "markov", "use_context": false},
    "train": {"epochs": 3, "lr": 0.0003, "seed": 18446744073709551615, "curriculum": false, "horizon": 4},
    "noise": {"dropout": 0.1, "sigma": 0.3, "samples": 50},
    "eval": {"horizons": [1, 5, 40], "jobs": 4}
  })";
  const auto cfg = parse_run_config(custom);
  EXPECT_EQ(cfg.dataset, gen::ModelTag::chaser);
  EXPECT_EQ(cfg.sim.agents, 7);
  EXPECT_EQ(cfg.sim.chaser.speed, 1.25);
  EXPECT_EQ(cfg.model.context_dim, 8);
  EXPECT_EQ(cfg.model.temporal_encoder, model::TemporalEncoder::markov);
  EXPECT_EQ(cfg.train.seed, 18446744073709551615ull);
  EXPECT_EQ(cfg.train.adam.lr, 0.0003);
  EXPECT_EQ(cfg.noise.samples, 50);
  EXPECT_EQ(cfg.eval.horizons, (std::vector<int>{1, 5, 40}));
  const auto text = to_json(cfg);
  const auto again = parse_run_config(text);
  EXPECT_EQ(to_json(again), text);
  EXPECT_EQ(again.model, cfg.model);
  EXPECT_EQ(again.noise, cfg.noise);
  EXPECT_EQ(again.eval, cfg.eval);
}

TEST(RunConfig, CanonicalOrdering) {
  const auto a = to_json(parse_run_config(R"({"train": {"epochs": 2, "batch_size": 4}})"));
  const auto b = to_json(parse_run_config(R"({"train": {"batch_size": 4, "epochs": 2}})"));
  EXPECT_EQ(a, b);
  EXPECT_LT(a.find("\"eval\""), a.find("\"model\""));
  EXPECT_LT(a.find("\"model\""), a.find("\"noise\""));
  EXPECT_LT(a.find("\"noise\""), a.find("\"sim\""));
  EXPECT_LT(a.find("\"sim\""), a.find("\"train\""));
}

TEST(RunConfig, UnknownKeysRejected) {
  expect_config_error(R"({"simulation": {}})", "'simulation'");
  expect_config_error(R"({"train": {"epoch": 3}})", "'train.epoch'");
  expect_config_error(R"({"sim": {"boids": {"speed": 1}}})", "'sim.boids.speed'");
}

TEST(RunConfig, WrongTypesRejected) {
  expect_config_error(R"({"train": {"epochs": "ten"}})", "train.epochs");
  expect_config_error(R"({"train": {"epochs": 2.5}})", "train.epochs");
  expect_config_error(R"({"train": {"seed": -1}})", "train.seed");
  expect_config_error(R"({"model": {"use_context": 1}})", "model.use_context");
  expect_config_error(R"({"model": []})", "'model' must be an object");
  expect_config_error(R"([1, 2])", "JSON object");
  expect_config_error(R"({"train": )", "not valid JSON");
}

TEST(RunConfig, InvalidValuesRejected) {
  expect_config_error(R"({"sim": {"model": "flock"}})", "flock");
  expect_config_error(R"({"model": {"temporal_encoder": "lstm"}})", "temporal_encoder");
  expect_config_error(R"({"model": {"mlp_hidden": [8, 0]}})", "model.mlp_hidden");
  expect_config_error(R"({"noise": {"dropout": 1.5}})", "noise.dropout");
  EXPECT_THROW(parse_run_config(R"({"train": {"epochs": 0}})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"eval": {"sweep_sizes": [2000, 1000]}})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"sim": {"steps": 0}})"), ConfigError);
}

TEST(RunConfig, MismatchedDimensionsRejected) {
  auto cfg = parse_run_config("{}");
  cfg.model.context_dim = 3;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.resolve();
  EXPECT_NO_THROW(cfg.validate());
}

TEST(RunConfig, LoadFromFile) {
  const auto dir = swarmnet::testing::temp_dir("config");
  {
    std::ofstream f(dir / "run.json");
    f << R"({"train": {"epochs": 7}})";
  }
  EXPECT_EQ(load_run_config(dir / "run.json").train.epochs, 7);
  EXPECT_THROW(load_run_config(dir / "missing.json"), IoError);
}
