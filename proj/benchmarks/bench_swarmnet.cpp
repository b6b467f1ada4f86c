#include <benchmark/benchmark.h>

#include "swarmnet/dataset.hpp"
#include "swarmnet/evalbench.hpp"
#include "swarmnet/ops.hpp"
#include "swarmnet/optim.hpp"
#include "swarmnet/rollout.hpp"
#include "swarmnet/run_config.hpp"
#include "swarmnet/trainer.hpp"

using namespace swarmnet;

namespace {

RunConfig config(gen::ModelTag tag, int agents) {
  RunConfig rc;
  rc.dataset = tag;
  rc.sim.agents = agents;
  rc.model.zero_init_output = false;
  rc.resolve();
  return rc;
}

std::span<const float> seed_window(const gen::Episode& ep, int window) {
  return {ep.states.data(), static_cast<std::size_t>(window * ep.agents * ep.state_dim)};
}

}  // namespace

static void BM_Simulate(benchmark::State& state) {
  const auto tag = static_cast<gen::ModelTag>(state.range(0));
  const auto rc = config(tag, 5);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(gen::simulate(tag, rc.sim, seed++));
  state.SetLabel(std::string(gen::to_string(tag)));
}
BENCHMARK(BM_Simulate)
    ->Arg(static_cast<int>(gen::ModelTag::boids))
    ->Arg(static_cast<int>(gen::ModelTag::helbing))
    ->Arg(static_cast<int>(gen::ModelTag::chaser));

// Forward over a full 50-step episode; edges grow as N(N-1).
static void BM_ForwardEpisode(benchmark::State& state) {
  const auto rc = config(gen::ModelTag::chaser, static_cast<int>(state.range(0)));
  const model::SwarmNet net(rc.model, 1);
  const auto ep = gen::simulate(rc.dataset, rc.sim, 1);
  const diff::Tensor series({static_cast<std::size_t>(ep.steps), static_cast<std::size_t>(ep.agents),
                             static_cast<std::size_t>(ep.state_dim)},
                            ep.states);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(series, ep.context, nullptr));
}
BENCHMARK(BM_ForwardEpisode)->Arg(2)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMicrosecond);

// One optimizer step on 8 episodes x 16 windows, unrolled over the given horizon.
static void BM_TrainStep(benchmark::State& state) {
  const int horizon = static_cast<int>(state.range(0));
  const auto rc = config(gen::ModelTag::chaser, 5);
  model::SwarmNet net(rc.model, 1);
  const auto eps = gen::make_dataset(rc.dataset, rc.sim, 8, 1);
  std::vector<train::WindowRef> refs;
  for (std::size_t e = 0; e < eps.size(); ++e)
    for (int k = 0; k < 16; ++k) refs.push_back({e, k * 2});
  const auto batch = train::stack_windows(eps, refs, rc.model.window_length(), horizon);
  auto params = net.parameters();
  diff::AdamState adam(diff::AdamConfig{}, params);
  for (auto _ : state) {
    diff::zero_grads(params);
    diff::Tape tape;
    diff::TapeScope scope(tape);
    const auto preds = train::multistep_unroll(net, batch.windows, horizon, nullptr);
    auto loss = train::loss_eq4(preds[0], batch.targets[0]);
    for (int j = 1; j < horizon; ++j) loss = diff::add(loss, train::loss_eq4(preds[j], batch.targets[j]));
    tape.backward(loss);
    diff::adam_step(params, adam);
  }
}
BENCHMARK(BM_TrainStep)->Arg(1)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_Predict40(benchmark::State& state) {
  const auto rc = config(gen::ModelTag::chaser, 5);
  const model::SwarmNet net(rc.model, 1);
  const auto ep = gen::simulate(rc.dataset, rc.sim, 1);
  const auto window = seed_window(ep, rc.model.window_length());
  for (auto _ : state) benchmark::DoNotOptimize(rollout::predict(net, window, ep.agents, ep.context, 40));
}
BENCHMARK(BM_Predict40)->Unit(benchmark::kMillisecond);

static void BM_SamplePlus(benchmark::State& state) {
  const auto rc = config(gen::ModelTag::chaser, 5);
  const model::SwarmNet net(rc.model, 1);
  const auto ep = gen::simulate(rc.dataset, rc.sim, 1);
  const auto window = seed_window(ep, rc.model.window_length());
  rollout::NoiseConfig noise;
  noise.dropout = 0.1;
  noise.samples = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rollout::sample_plus(net, window, ep.agents, ep.context, 40, noise));
}
BENCHMARK(BM_SamplePlus)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_Evaluate(benchmark::State& state) {
  const auto rc = config(gen::ModelTag::boids, 5);
  const model::SwarmNet net(rc.model, 1);
  const auto test = gen::make_dataset(rc.dataset, rc.sim, 20, 1);
  const std::vector<int> horizons{1, 5, 10, 40};
  for (auto _ : state) benchmark::DoNotOptimize(eval::evaluate(net, test, horizons, "boids", "swarmnet"));
}
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
