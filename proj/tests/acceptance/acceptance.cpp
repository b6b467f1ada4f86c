// Acceptance driver: one PASS/FAIL line per criterion on stdout, progress on stderr.
//   acceptance [--work-dir DIR] [--only 1,7,12]

#include <malloc.h>
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "model_oracle.hpp"
#include "swarmnet/checkpoint.hpp"
#include "swarmnet/dataset.hpp"
#include "swarmnet/evalbench.hpp"
#include "swarmnet/rollout.hpp"
#include "swarmnet/run_config.hpp"
#include "swarmnet/trainer.hpp"

using namespace swarmnet;
using model::SwarmNet;
using model::SwarmNetConfig;
namespace fs = std::filesystem;
namespace oracle = swarmnet::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

fs::path g_work = "acceptance_work";

void progress(const std::string& msg) { std::cerr << "  .. " << msg << std::endl; }

RunConfig base_config(gen::ModelTag tag) {
  RunConfig rc;
  rc.dataset = tag;
  rc.train.windows_per_episode = 16;
  rc.resolve();
  rc.validate();
  return rc;
}

// ---------------------------------------------------------------- shared data

constexpr std::uint64_t kTestSeed = 900'000'000;

struct ChaserRun {
  RunConfig rc;
  std::vector<gen::Episode> test;
  std::optional<SwarmNet> model;
};

ChaserRun& chaser() {
  static ChaserRun run;
  if (run.model) return run;
  run.rc = base_config(gen::ModelTag::chaser);
  const auto data = gen::make_dataset(run.rc.dataset, run.rc.sim, 1000, 1);
  run.test = gen::make_dataset(run.rc.dataset, run.rc.sim, 100, kTestSeed);
  eval::audit_disjoint(data, run.test);
  progress("training Chaser model (1000 episodes, curriculum to horizon " +
           std::to_string(run.rc.train.max_horizon) + ", " + std::to_string(run.rc.train.epochs) + " epochs)");
  auto res = train::train(data, run.rc.model, run.rc.train, [](const train::EpochLog& e) {
    progress("chaser epoch " + std::to_string(e.epoch) + " h=" + std::to_string(e.horizon) +
             " val Lnorm " + fmt(e.val_Lnorm));
  });
  save_checkpoint(g_work / "chaser.swc", run.rc, res.model);
  run.model.emplace(std::move(res.model));
  return run;
}

constexpr int kBoidsSeeds = 5;
constexpr int kBoidsTrain = 400;
constexpr int kBoidsEpochs = 12;

struct BoidsRun {
  RunConfig rc;
  std::vector<gen::Episode> test;
  std::vector<SwarmNet> with_context;
  std::vector<SwarmNet> without_context;
};

BoidsRun& boids() {
  static BoidsRun run;
  if (!run.with_context.empty()) return run;
  run.rc = base_config(gen::ModelTag::boids);
  run.rc.train.epochs = kBoidsEpochs;
  run.test = gen::make_dataset(run.rc.dataset, run.rc.sim, 100, kTestSeed);
  for (int s = 1; s <= kBoidsSeeds; ++s) {
    const auto data = gen::make_dataset(run.rc.dataset, run.rc.sim, kBoidsTrain, 1 + 10'000'000ull * s);
    eval::audit_disjoint(data, run.test);
    auto tcfg = run.rc.train;
    tcfg.seed = static_cast<std::uint64_t>(s);
    for (bool ctx : {true, false}) {
      auto mcfg = run.rc.model;
      mcfg.use_context = ctx;
      progress("training Boids model seed " + std::to_string(s) + (ctx ? " with" : " without") + " context");
      auto res = train::train(data, mcfg, tcfg);
      (ctx ? run.with_context : run.without_context).push_back(std::move(res.model));
    }
  }
  return run;
}

// ------------------------------------------------------------------ criteria

Outcome gradients() {
  double worst = 0.0;
  std::string where;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SwarmNetConfig cfg;
    cfg.zero_init_output = false;
    const SwarmNet net(cfg, seed);
    for (const auto& g : oracle::model_gradient_errors(net, 10, 3, seed, 1e-6))
      if (g.rel_err > worst) {
        worst = g.rel_err;
        where = g.name + " seed " + std::to_string(seed);
      }
  }
  return {worst < 1e-3, "max relative error " + fmt(worst) + " (" + where + ")"};
}

Outcome graph_conv_oracle() {
  diff::Rng rng(10);
  std::uniform_int_distribution<int> agents_dist(1, 6);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    SwarmNetConfig cfg;
    cfg.zero_init_output = false;
    SwarmNet net(cfg, 100 + rep);
    const auto n = static_cast<std::size_t>(agents_dist(rng));
    const auto nodes = oracle::random_tensor({n, static_cast<std::size_t>(cfg.encoded_size)}, rng);
    const auto& gc = net.params().graph[0];
    const auto e = net.edge_update(nodes, n, gc, nullptr);
    const auto v = net.node_update(nodes, net.aggregate_edges(e, 1, n, gc), gc, nullptr);
    std::vector<oracle::Vec> rows(n);
    const std::size_t w = nodes.dim(1);
    for (std::size_t r = 0; r < n; ++r)
      rows[r] = oracle::Vec(nodes.values().begin() + r * w, nodes.values().begin() + (r + 1) * w);
    std::size_t k = 0;
    for (const auto& row : oracle::ref_graph_conv(gc, rows, static_cast<std::size_t>(cfg.edge_size)))
      for (double want : row) worst = std::max(worst, std::abs(v.values()[k++] - want));
  }
  return {worst <= 1e-6, "max elementwise difference " + fmt(worst) + " over 20 graphs"};
}

Outcome shape_law() {
  diff::Rng rng(13);
  std::uniform_int_distribution<int> ld(1, 4), kd(1, 4), extra(0, 8), nd(1, 4);
  int bad = 0;
  const int trials = 40;
  for (int rep = 0; rep < trials; ++rep) {
    SwarmNetConfig cfg;
    cfg.conv_layers = ld(rng);
    cfg.kernel_size = kd(rng);
    cfg.conv_filters = 4;
    cfg.encoded_size = 4;
    cfg.mlp_hidden = {8};
    cfg.edge_size = 4;
    const int steps = cfg.window_length() + extra(rng);
    const auto n = static_cast<std::size_t>(nd(rng));
    const SwarmNet net(cfg, 0);
    const auto y = net.forward(oracle::random_tensor({static_cast<std::size_t>(steps), n, 4}, rng),
                               oracle::uniform_values(5, rng), nullptr);
    if (y.dim(0) != static_cast<std::size_t>(steps - cfg.conv_layers * (cfg.kernel_size - 1))) ++bad;
  }
  const SwarmNet net(SwarmNetConfig{}, 0);
  const auto y = net.forward(oracle::random_tensor({50, 5, 4}, rng), oracle::uniform_values(5, rng), nullptr);
  return {bad == 0 && y.dim(0) == 44,
          std::to_string(trials - bad) + "/" + std::to_string(trials) + " random (T, L, K); T=50 L=3 K=3 gives " +
              std::to_string(y.dim(0))};
}

Outcome kernels() {
  SwarmNetConfig cfg;
  cfg.conv_layers = 1;
  cfg.kernel_size = 3;
  cfg.encoded_size = 3;
  SwarmNet net(cfg, 0);
  auto kernel = net.params().conv[0].kernel.mutable_values();  // [K, C, F]
  std::fill(kernel.begin(), kernel.end(), 0.0f);
  const float filters[3][3] = {{0, 0, 1}, {0, -1, 1}, {1, -2, 1}};
  const int channels = cfg.input_channels();
  for (int f = 0; f < 3; ++f)
    for (int tau = 0; tau < 3; ++tau) kernel[(tau * channels + 0) * 3 + f] = filters[f][tau];
  int mismatches = 0, checked = 0;
  const std::vector<std::function<double(double)>> series = {
      [](double t) { return 3.0 * t - 2.0; }, [](double t) { return t * t; },
      [](double t) { return t * t * t; }};
  for (const auto& x : series) {
    const int steps = 12;
    std::vector<float> states(steps * 4, 0.0f);
    for (int t = 0; t < steps; ++t) states[t * 4] = static_cast<float>(x(t));
    const std::vector<float> ctx(static_cast<std::size_t>(cfg.context_dim), 0.0f);
    const auto windows = model::make_windows(states, steps, 1, 4, ctx, 3, 0, steps - 2);
    const auto v = net.encode_temporal(windows);
    for (int s = 0; s + 2 < steps; ++s) {
      const double t = s + 2;
      const double want[3] = {x(t), x(t) - x(t - 1), x(t) - 2 * x(t - 1) + x(t - 2)};
      for (int f = 0; f < 3; ++f, ++checked)
        if (v.values()[s * 3 + f] != want[f]) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(checked - mismatches) + "/" + std::to_string(checked) +
                               " exact last-value, first- and second-difference outputs"};
}

Outcome equivariance() {
  diff::Rng rng(15);
  SwarmNetConfig cfg;
  cfg.zero_init_output = false;
  const SwarmNet net(cfg, 15);
  const std::size_t steps = 12, n = 5;
  const auto series = oracle::random_tensor({steps, n, 4}, rng);
  const auto ctx = oracle::uniform_values(5, rng);
  const auto base = net.forward(series, ctx, nullptr);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<float> permuted(series.numel());
    for (std::size_t t = 0; t < steps; ++t)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < 4; ++c)
          permuted[(t * n + i) * 4 + c] = series.values()[(t * n + perm[i]) * 4 + c];
    const auto out = net.forward(diff::Tensor({steps, n, 4}, permuted), ctx, nullptr);
    for (std::size_t t = 0; t < base.dim(0); ++t)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < 4; ++c)
          worst = std::max(worst, static_cast<double>(std::abs(out.values()[(t * n + i) * 4 + c] -
                                                               base.values()[(t * n + perm[i]) * 4 + c])));
  }
  return {worst <= 1e-5, "max deviation " + fmt(worst) + " over 10 permutations"};
}

Outcome calibration() {
  bool ok = true;
  std::string detail;
  for (auto tag : {gen::ModelTag::boids, gen::ModelTag::helbing, gen::ModelTag::chaser}) {
    const auto rc = base_config(tag);
    const auto test = gen::make_dataset(tag, rc.sim, 50, kTestSeed);
    const auto rep = eval::calibration(test, rc.model.window_length(), std::string(gen::to_string(tag)));
    const double v = rep.rows.at(0).Lnorm_mean;
    ok = ok && std::abs(v - 1.0) <= 1e-6;
    detail += std::string(detail.empty() ? "" : ", ") + std::string(gen::to_string(tag)) + " " + fmt(v);
  }
  return {ok, "copy-baseline L_norm " + detail};
}

struct Scores {
  double model5 = 0.0, model40 = 0.0, copy40 = 0.0;
};

Scores chaser_scores() {
  auto& run = chaser();
  static std::optional<Scores> cached;
  if (cached) return *cached;
  const std::vector<int> hs{5, 40};
  const auto m = eval::evaluate(*run.model, run.test, hs, "chaser", "swarmnet");
  const model::CopyLastState copy(run.rc.model.window_length(), run.rc.model.state_dim, run.rc.model.context_dim);
  const auto c = eval::evaluate(copy, run.test, hs, "chaser", "copy-baseline");
  cached = Scores{m.at(5)->Lnorm_mean, m.at(40)->Lnorm_mean, c.at(40)->Lnorm_mean};
  return *cached;
}

Outcome chaser_reproduction() {
  const auto s = chaser_scores();
  const double ratio = s.model40 / s.copy40;
  return {s.model5 <= 0.3 && ratio <= 0.5,
          "h=5 L_norm " + fmt(s.model5) + " (<= 0.3); h=40 L_norm " + fmt(s.model40) + " vs copy " + fmt(s.copy40) +
              ", ratio " + fmt(ratio) + " (<= 0.5; looser bound 0.8 " + (ratio <= 0.8 ? "met" : "missed") + ")"};
}

Outcome context_ablation() {
  auto& run = boids();
  const std::vector<int> hs{40};
  int wins = 0;
  std::string detail;
  for (int s = 0; s < kBoidsSeeds; ++s) {
    const double with = eval::evaluate(run.with_context[s], run.test, hs, "boids", "ctx").at(40)->Lnorm_mean;
    const double without = eval::evaluate(run.without_context[s], run.test, hs, "boids", "noctx").at(40)->Lnorm_mean;
    wins += with < without;
    detail += " " + fmt(with) + "/" + fmt(without);
  }
  return {wins >= 4, std::to_string(wins) + "/" + std::to_string(kBoidsSeeds) +
                         " seeds favour context (h=40 L_norm with/without:" + detail +
                         "; sign test p " + fmt(eval::sign_test_p(wins, kBoidsSeeds)) + ")"};
}

Outcome curriculum_generalization() {
  auto& run = chaser();
  const auto& cfg = run.rc.model;
  std::size_t finite = 0;
  for (const auto& ep : run.test) {
    const std::span<const float> window(ep.states.data(),
                                        static_cast<std::size_t>(cfg.window_length() * ep.agents * ep.state_dim));
    const auto r = rollout::predict(*run.model, window, ep.agents, ep.context, 40);
    finite += std::all_of(r.predicted.begin(), r.predicted.end(), [](float v) { return std::isfinite(v); });
  }
  const auto s = chaser_scores();
  return {finite == run.test.size() && s.model40 < s.copy40,
          std::to_string(finite) + "/" + std::to_string(run.test.size()) +
              " finite 40-step rollouts (trained to horizon " + std::to_string(run.rc.train.max_horizon) +
              "); h=40 L_norm " + fmt(s.model40) + " < copy " + fmt(s.copy40)};
}

Outcome stochastic_sampling() {
  auto& run = chaser();
  const auto& cfg = run.rc.model;
  const auto& ep = run.test.front();
  const std::span<const float> window(ep.states.data(),
                                      static_cast<std::size_t>(cfg.window_length() * ep.agents * ep.state_dim));

  rollout::NoiseConfig none;
  none.samples = 10;
  const auto still = rollout::sample_plus(*run.model, window, ep.agents, ep.context, 40, none);
  const std::size_t per = still.samples.size() / 10;
  bool identical = true;
  for (int s = 1; s < 10; ++s)
    identical = identical && std::memcmp(still.samples.data(), still.samples.data() + s * per, per * sizeof(float)) == 0;

  int growing = 0;
  double worst_mass = 0.0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    rollout::NoiseConfig noise;
    noise.dropout = 0.1;
    noise.samples = 50;
    noise.seed = seed;
    const auto r = rollout::sample_plus(*run.model, window, ep.agents, ep.context, 40, noise);
    const double d5 = r.mean_position_dispersion(4), d30 = r.mean_position_dispersion(29);
    growing += d30 > d5;
    detail += " " + fmt(d5) + "->" + fmt(d30);
    for (const auto& h : rollout::marginal_histograms(r, 29, 20))
      worst_mass = std::max(worst_mass, std::abs(std::accumulate(h.masses.begin(), h.masses.end(), 0.0) - 1.0));
  }
  return {identical && growing >= 4 && worst_mass <= 1e-9,
          std::string("p=0 sigma=0 samples ") + (identical ? "bitwise identical" : "DIFFER") + "; dispersion grows in " +
              std::to_string(growing) + "/5 seeds (step 5->30:" + detail + "); histogram mass error " +
              fmt(worst_mass)};
}

Outcome clone_imitation() {
  const auto closed_loop = [](const SwarmNet& net, const RunConfig& rc, std::uint64_t seed) {
    const auto reference = gen::simulate(rc.dataset, rc.sim, seed);
    const rollout::PlantConfig plant{rc.sim.dt, rc.sim.max_speed(rc.dataset), rc.sim.arena_half_width};
    const auto initial = reference.frame(0);
    return std::make_pair(reference, rollout::clone_swarm(net, initial, reference.context, 50, plant).executed);
  };

  auto& c = chaser();
  int contracting = 0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto [ref, ex] = closed_loop(*c.model, c.rc, 2'000'000 + k);
    contracting += gen::circumradius(ex.frame(ex.steps - 1)) < gen::circumradius(ex.frame(0));
  }

  auto& b = boids();
  int approaching = 0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto [ref, ex] = closed_loop(b.with_context.front(), b.rc, 2'000'000 + k);
    const auto goal = *ref.context_spec().goal;
    const auto distance = [&](int t) {
      double acc = 0.0;
      for (const auto& a : ex.frame(t)) acc += (a.position - goal).norm();
      return acc / ex.agents;
    };
    approaching += distance(ex.steps - 1) < distance(0);
  }
  return {contracting >= 8 && approaching >= 8, "Chaser clone contracts in " + std::to_string(contracting) +
                                                    "/10 spawns; Boids clone nears its goal in " +
                                                    std::to_string(approaching) + "/10 spawns"};
}

// ------------------------------------------------------------------ pipeline

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_cli(const fs::path& cwd, const std::string& args) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" + SWARMNET_CLI_PATH + "' " + args + " >> cli.log 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Blanks the seconds column of CSV reports and logs.
std::string mask_seconds(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::stringstream row(line);
    for (std::string c; std::getline(row, c, ',');) header.push_back(c);
  }
  const auto col = std::find(header.begin(), header.end(), "seconds");
  if (col == header.end()) return text;
  const auto idx = static_cast<std::size_t>(col - header.begin());
  std::string out = line + "\n";
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char ch : line) {
      if (ch == '"') quoted = !quoted;
      if (ch == ',' && !quoted) {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += ch;
      }
    }
    cells.push_back(cell);
    if (idx < cells.size()) cells[idx] = "-";
    for (std::size_t k = 0; k < cells.size(); ++k) out += (k ? "," : "") + cells[k];
    out += "\n";
  }
  return out;
}

Outcome determinism() {
  const auto root = g_work / "pipeline";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::vector<std::string> stages = {
      "generate --model chaser --episodes 40 --seed 11 --out train.swm",
      "generate --model chaser --episodes 6 --seed 5000 --out test.swm",
      "train --data {}/train.swm --epochs 3 --max-horizon 2 --windows-per-episode 8 --quiet",
      "eval --checkpoint {}/model.swc --data {}/test.swm --horizons 5,40",
      "rollout --checkpoint {}/model.swc --data {}/test.swm --episode 1",
      "sample --checkpoint {}/model.swc --data {}/test.swm --samples 30 --dropout 0.1 --seed 4",
      "clone --checkpoint {}/model.swc --seed 9",
      "plot --data {}/test.swm --checkpoint {}/model.swc --episode 2",
      "ablate --data {}/train.swm --test-data {}/test.swm --variants 'decoder,swarmnet(context)' --horizons 5 "
      "--epochs 1 --windows-per-episode 2",
  };
  for (const std::string run : {"a", "b"})
    for (auto stage : stages) {
      for (auto pos = stage.find("{}"); pos != std::string::npos; pos = stage.find("{}"))
        stage.replace(pos, 2, run);
      const int code = run_cli(root, "--out-dir " + run + " " + stage);
      if (code != 0) return {false, "'" + stage + "' exited " + std::to_string(code) + " (see cli.log)"};
    }

  std::size_t artifacts = 0;
  std::vector<std::string> problems;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const auto name = entry.path().filename().string();
    const auto a = slurp(entry.path());
    const auto b = slurp(root / "b" / name);
    if (mask_seconds(a) != mask_seconds(b)) problems.push_back(name + " differs");
    if (name.ends_with(".config.json")) continue;
    ++artifacts;
    if (name.ends_with(".swc")) continue;  // config lives in the checkpoint header
    const auto sidecar = root / "a" / (name + ".config.json");
    if (!fs::exists(sidecar)) {
      problems.push_back(name + " has no config sidecar");
      continue;
    }
    try {
      const auto doc = nlohmann::json::parse(slurp(sidecar));
      parse_run_config(doc.at("config").dump());
    } catch (const std::exception& e) {
      problems.push_back(name + " sidecar: " + e.what());
    }
  }
  const auto ck = load_checkpoint(root / "a" / "model.swc");
  if (ck.config.train.epochs != 3) problems.push_back("checkpoint does not embed the run config");
  for (const char* svg : {"rollout.svg", "samples.svg", "clone.svg", "plot.svg"})
    if (slurp(root / "a" / svg).find("<metadata>") == std::string::npos)
      problems.push_back(std::string(svg) + " lacks embedded config");
  std::string detail = std::to_string(artifacts) + " artifacts from " + std::to_string(stages.size()) +
                       " stages reproduced byte for byte (timing columns masked), each with embedded config";
  if (!problems.empty()) {
    detail = problems.front();
    for (std::size_t k = 1; k < problems.size(); ++k) detail += "; " + problems[k];
  }
  return {problems.empty(), detail};
}

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);

  std::set<int> only;
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--work-dir" && k + 1 < argc) {
      g_work = argv[++k];
    } else if (arg == "--only" && k + 1 < argc) {
      std::stringstream list(argv[++k]);
      for (std::string item; std::getline(list, item, ',');) only.insert(std::stoi(item));
    } else {
      std::cerr << "usage: acceptance [--work-dir DIR] [--only 1,2,...]\n";
      return 2;
    }
  }
  fs::create_directories(g_work);

  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", gradients},
      {2, "graph convolution oracle", graph_conv_oracle},
      {3, "temporal shape law", shape_law},
      {4, "hand-set kernel semantics", kernels},
      {5, "permutation equivariance", equivariance},
      {6, "copy-baseline calibration", calibration},
      {7, "desk-scale Chaser reproduction", chaser_reproduction},
      {8, "context ablation ordering", context_ablation},
      {9, "curriculum generalization", curriculum_generalization},
      {10, "stochastic sampling", stochastic_sampling},
      {11, "clone-swarm imitation", clone_imitation},
      {12, "determinism and provenance", determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.contains(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << ": " << o.detail << " ["
              << fmt(seconds) << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
