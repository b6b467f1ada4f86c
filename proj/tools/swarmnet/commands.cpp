#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <functional>
#include <memory>

#include "swarmnet/checkpoint.hpp"
#include "swarmnet/dataset.hpp"
#include "swarmnet/errors.hpp"
#include "swarmnet/evalbench.hpp"
#include "swarmnet/rollout.hpp"
#include "swarmnet/svg.hpp"
#include "swarmnet/trainer.hpp"

namespace swarmnet::cli {

namespace {

template <typename T>
struct Flag {
  T value{};
  CLI::Option* opt = nullptr;
  bool set() const { return opt != nullptr && opt->count() > 0; }
  void apply(T& target) const {
    if (set()) target = value;
  }
};

template <typename T>
struct is_vector : std::false_type {};
template <typename T>
struct is_vector<std::vector<T>> : std::true_type {};

template <typename T>
void add(CLI::App* sub, const std::string& name, Flag<T>& flag, const std::string& help) {
  flag.opt = sub->add_option(name, flag.value, help);
  if constexpr (is_vector<T>::value) flag.opt->delimiter(',');
}

// Subcommand callbacks only record what to run; main runs it once the global
// options are known.
std::function<void()>* pending = nullptr;

void on_run(CLI::App* sub, std::function<void()> body) {
  sub->callback([body = std::move(body)] { *pending = body; });
}

std::string file_name(const std::string& path) { return fs::path(path).filename().string(); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<gen::Episode> read_episodes(const std::string& path) {
  auto data = gen::read_dataset(path);
  if (data.empty()) throw ConfigError("dataset '" + path + "' holds no episodes");
  return data;
}

void check_dimensions(const model::StepPredictor& model, const gen::Episode& ep) {
  if (ep.state_dim != model.state_dim() || static_cast<int>(ep.context.size()) != model.context_dim()) {
    throw DimensionError("model expects states [T x N x " + std::to_string(model.state_dim()) + "] with " +
                         std::to_string(model.context_dim()) + " context values; data has [" +
                         std::to_string(ep.steps) + " x " + std::to_string(ep.agents) + " x " +
                         std::to_string(ep.state_dim) + "] with " + std::to_string(ep.context.size()) +
                         " context values");
  }
}

void check_context(const RunConfig& cfg, const gen::Episode& ep) {
  if (static_cast<int>(ep.context.size()) != cfg.model.context_dim) {
    throw DimensionError("dataset episodes carry " + std::to_string(ep.context.size()) +
                         " context values; the configuration expects " + std::to_string(cfg.model.context_dim) +
                         " (sim.max_obstacles = " + std::to_string(cfg.sim.max_obstacles) + ")");
  }
}

const gen::Episode& pick(const std::vector<gen::Episode>& data, int index) {
  if (index < 0 || index >= static_cast<int>(data.size())) {
    throw IndexError("episode " + std::to_string(index) + " outside dataset of " + std::to_string(data.size()));
  }
  return data[static_cast<std::size_t>(index)];
}

std::span<const float> seed_window(const gen::Episode& ep, int window_length) {
  if (ep.steps < window_length) {
    throw SeriesTooShortError("episode has " + std::to_string(ep.steps) + " steps; the model window needs " +
                              std::to_string(window_length));
  }
  return std::span<const float>(ep.states).first(static_cast<std::size_t>(window_length) * ep.agents *
                                                 ep.state_dim);
}

std::vector<float> positions(const gen::Episode& ep, int t) {
  std::vector<float> out;
  for (int i = 0; i < ep.agents; ++i) {
    out.push_back(ep.at(t, i, 0));
    out.push_back(ep.at(t, i, 1));
  }
  return out;
}

void write_report(const Session& s, const std::string& out, const std::string& command, const json& params,
                  const std::vector<eval::EvalReport>& reports) {
  const auto path = s.output(out);
  s.write_text(path, eval::report_csv(reports));
  s.write_sidecar(path, command, params);
  std::cout << eval::report_table(reports);
  std::cout << "wrote " << path.string() << "\n";
}

void write_plot(const Session& s, const std::string& out, const std::string& command, const json& params,
                plot::PlotSpec spec) {
  const auto path = s.output(out);
  spec.metadata = s.provenance(command, params).dump();
  s.write_text(path, plot::render_svg(spec));
  s.write_sidecar(path, command, params);
  std::cout << "wrote " << path.string() << "\n";
}

void add_generate(CLI::App& app, const GlobalOptions& g) {
  struct Args {
    Flag<std::string> model;
    Flag<int> steps, agents, obstacles;
    int episodes = 1000;
    std::string out;
  };
  auto a = std::make_shared<Args>();
  auto* sub = app.add_subcommand("generate", "Simulate a dataset of demonstration episodes");
  add(sub, "--model", a->model, "boids, helbing or chaser");
  sub->add_option("--episodes", a->episodes, "Episode count")->check(CLI::PositiveNumber);
  add(sub, "--steps", a->steps, "Steps per episode");
  add(sub, "--agents", a->agents, "Agents per episode");
  add(sub, "--max-obstacles", a->obstacles, "Obstacle slots in the context encoding");
  sub->add_option("--out", a->out, "Dataset file (default <model>.swm)");
  on_run(sub, [a, &g] {
    Session s(g);
    auto& cfg = s.config();
    if (a->model.set()) cfg.dataset = gen::parse_model_tag(a->model.value);
    a->steps.apply(cfg.sim.steps);
    a->agents.apply(cfg.sim.agents);
    a->obstacles.apply(cfg.sim.max_obstacles);
    s.finalize();
    const std::uint64_t seed = s.seed_or(0);
    const auto data = gen::make_dataset(cfg.dataset, cfg.sim, a->episodes, seed);
    const auto path = s.output(a->out.empty() ? std::string(gen::to_string(cfg.dataset)) + ".swm" : a->out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    gen::write_dataset(path, data);
    s.write_sidecar(path, "generate", {{"episodes", a->episodes}, {"base_seed", seed}});
    std::cout << "generated " << data.size() << " " << gen::to_string(cfg.dataset) << " episodes (T=" << cfg.sim.steps
              << ", N=" << cfg.sim.agents << ", d_c=" << cfg.sim.context_dim() << ") -> " << path.string() << ", "
              << fs::file_size(path) << " bytes\n";
  });
}

void add_train(CLI::App& app, const GlobalOptions& g) {
  struct Args {
    std::string data;
    std::string out = "model.swc";
    std::string log = "train_log.csv";
    Flag<int> epochs, max_horizon, horizon, batch_size, windows;
    Flag<double> lr, dropout;
    bool no_curriculum = false;
    bool quiet = false;
  };
  auto a = std::make_shared<Args>();
  auto* sub = app.add_subcommand("train", "Train SwarmNet on a dataset");
  sub->add_option("--data", a->data, "Dataset file")->required();
  sub->add_option("--out,--checkpoint", a->out, "Checkpoint file");
  sub->add_option("--log", a->log, "Training log CSV");
  add(sub, "--epochs", a->epochs, "Training epochs");
  add(sub, "--max-horizon", a->max_horizon, "Final curriculum horizon");
  add(sub, "--horizon", a->horizon, "Fixed horizon with --no-curriculum");
  add(sub, "--batch-size", a->batch_size, "Episodes per Adam step");
  add(sub, "--windows-per-episode", a->windows, "Windows drawn per episode and epoch (0: all)");
  add(sub, "--lr", a->lr, "Adam learning rate");
  add(sub, "--dropout", a->dropout, "Dropout during training");
  sub->add_flag("--no-curriculum", a->no_curriculum, "Train at a fixed horizon");
  sub->add_flag("--quiet", a->quiet, "No per-epoch lines");
  on_run(sub, [a, &g] {
    Session s(g);
    auto& cfg = s.config();
    a->epochs.apply(cfg.train.epochs);
    a->max_horizon.apply(cfg.train.max_horizon);
    a->horizon.apply(cfg.train.horizon);
    a->batch_size.apply(cfg.train.batch_size);
    a->windows.apply(cfg.train.windows_per_episode);
    a->lr.apply(cfg.train.adam.lr);
    a->dropout.apply(cfg.model.dropout);
    if (a->no_curriculum) cfg.train.curriculum = false;
    const auto data = read_episodes(a->data);
    cfg.dataset = data.front().tag;
    s.finalize();
    check_context(cfg, data.front());

    const auto result = train::train(data, cfg.model, cfg.train, [&](const train::EpochLog& row) {
      if (a->quiet) return;
      std::cout << "epoch " << row.epoch << "/" << cfg.train.epochs << "  h=" << row.horizon
                << "  train L_norm " << fmt(row.train_Lnorm) << "  val L_norm " << fmt(row.val_Lnorm) << "  ("
                << fmt(row.seconds) << " s)\n"
                << std::flush;
    });
    const auto ckpt = s.output(a->out);
    if (ckpt.has_parent_path()) fs::create_directories(ckpt.parent_path());
    save_checkpoint(ckpt, cfg, result.model);
    const auto log = s.output(a->log);
    s.write_text(log, train::training_log_csv(result.log));
    s.write_sidecar(log, "train", {{"data", file_name(a->data)}, {"episodes", data.size()}});
    std::cout << "best epoch " << result.best_epoch << " (val L_norm " << fmt(result.best_val_Lnorm) << ") -> "
              << ckpt.string() << "\n";
  });
}

void add_eval(CLI::App& app, const GlobalOptions& g) {
  struct Args {
    std::string checkpoint, data;
    std::string out = "eval.csv";
    Flag<std::vector<int>> horizons;
  };
  auto a = std::make_shared<Args>();
  auto* sub = app.add_subcommand("eval", "Horizon losses of a checkpoint on held-out episodes");
  sub->add_option("--checkpoint", a->checkpoint, "Checkpoint file")->required();
  sub->add_option("--data", a->data, "Test dataset")->required();
  add(sub, "--horizons", a->horizons, "Comma-separated horizons");
  sub->add_option("--out", a->out, "Report CSV");
  on_run(sub, [a, &g] {
    Session s(g);
    const auto ck = load_checkpoint(a->checkpoint);
    s.adopt_checkpoint(ck.config);
    auto& cfg = s.config();
    a->horizons.apply(cfg.eval.horizons);
    s.finalize();
    const auto test = read_episodes(a->data);
    check_dimensions(ck.model, test.front());
    const std::string tag(gen::to_string(test.front().tag));
    const int tw = ck.model.window_length();
    const model::CopyLastState copy(tw, ck.model.state_dim(), ck.model.context_dim());
    std::vector<eval::EvalReport> reports{
        eval::calibration(test, tw, tag),
        eval::evaluate(copy, test, cfg.eval.horizons, tag, "copy-baseline"),
        eval::evaluate(ck.model, test, cfg.eval.horizons, tag, "swarmnet", cfg.train.seed),
    };
    write_report(s, a->out, "eval",
                 {{"checkpoint", file_name(a->checkpoint)}, {"data", file_name(a->data)}}, reports);
  });
}

void add_ablate(CLI::App& app, const GlobalOptions& g) {
  struct Args {
    std::string data, test;
    std::string out = "ablation.csv";
    std::vector<std::string> variants;
    Flag<std::vector<int>> horizons;
    Flag<int> epochs, windows;
  };
  auto a = std::make_shared<Args>();
  auto* sub = app.add_subcommand("ablate", "Train and score the encoder/context/curriculum variants");
  sub->add_option("--data", a->data, "Training dataset")->required();
  sub->add_option("--test-data", a->test, "Test dataset")->required();
  sub->add_option("--variants", a->variants, "Comma-separated variant names (default: all five)")->delimiter(',');
  add(sub, "--horizons", a->horizons, "Comma-separated horizons");
  add(sub, "--epochs", a->epochs, "Training epochs per variant");
  add(sub, "--windows-per-episode", a->windows, "Windows drawn per episode and epoch (0: all)");
  sub->add_option("--out", a->out, "Report CSV");
  on_run(sub, [a, &g] {
    Session s(g);
    auto& cfg = s.config();
    a->horizons.apply(cfg.eval.horizons);
    a->epochs.apply(cfg.train.epochs);
    a->windows.apply(cfg.train.windows_per_episode);
    const auto train_set = read_episodes(a->data);
    const auto test = read_episodes(a->test);
    cfg.dataset = train_set.front().tag;
    s.finalize();
    check_context(cfg, train_set.front());
    check_context(cfg, test.front());
    std::vector<eval::VariantSpec> variants;
    if (a->variants.empty()) {
      variants = eval::ablation_variants();
    } else {
      for (const auto& name : a->variants) variants.push_back(eval::find_variant(name));
    }
    const eval::AblationInput in{train_set, test, cfg.model, cfg.train, cfg.eval.horizons,
                                 std::string(gen::to_string(cfg.dataset)), cfg.eval.jobs};
    const auto reports = eval::ablation_suite(in, variants);
    json names = json::array();
    for (const auto& v : variants) names.push_back(v.name);
    write_report(s, a->out, "ablate",
                 {{"data", file_name(a->data)}, {"test_data", file_name(a->test)}, {"variants", names}}, reports);
  });
}

void add_sweep(CLI::App& app, const GlobalOptions& g) {
  struct Args {
    std::string test;
    std::string out = "sweep.csv";
    Flag<std::string> model;
    Flag<std::vector<int>> sizes, horizons;
    Flag<int> seeds, epochs, windows;
  };
  auto a = std::make_shared<Args>();
  auto* sub = app.add_subcommand("sweep", "Train one model per training-set size and score each");
  sub->add_option("--test-data", a->test, "Test dataset")->required();
  add(sub, "--model", a->model, "Simulator for the training sets (default: the test set's)");
  add(sub, "--sizes", a->sizes, "Comma-separated ascending training-set sizes");
  add(sub, "--horizons", a->horizons, "Comma-separated horizons");
  add(sub, "--seeds", a->seeds, "Training seeds per size");
  add(sub, "--epochs", a->epochs, "Training epochs per cell");
  add(sub, "--windows-per-episode", a->windows, "Windows drawn per episode and epoch (0: all)");
  sub->add_option("--out", a->out, "Grid CSV");
  on_run(sub, [a, &g] {
    Session s(g);
    auto& cfg = s.config();
    const auto test = read_episodes(a->test);
    cfg.dataset = a->model.set() ? gen::parse_model_tag(a->model.value) : test.front().tag;
    a->sizes.apply(cfg.eval.sweep_sizes);
    a->horizons.apply(cfg.eval.horizons);
    a->seeds.apply(cfg.eval.sweep_seeds);
    a->epochs.apply(cfg.train.epochs);
    a->windows.apply(cfg.train.windows_per_episode);
    s.finalize();
    check_context(cfg, test.front());
    const std::uint64_t base = s.seed_or(0);
    const auto tag = cfg.dataset;
    const auto sim = cfg.sim;
    const eval::SweepSpec spec{cfg.eval.sweep_sizes, cfg.eval.horizons, cfg.eval.sweep_seeds};
    const auto reports = eval::sample_size_sweep(
        spec, [&](int count, std::uint64_t seed) { return gen::make_dataset(tag, sim, count, seed); }, base, test,
        cfg.model, cfg.train, std::string(gen::to_string(tag)), cfg.eval.jobs);
    write_report(s, a->out, "sweep", {{"test_data", file_name(a->test)}, {"base_seed", base}}, reports);
  });
}

struct PredictArgs {
  std::string checkpoint, data;
  int episode = 0;
  int horizon = 40;
  std::string out, svg;
};

void add_predict_options(CLI::App* sub, PredictArgs& a) {
  sub->add_option("--checkpoint", a.checkpoint, "Checkpoint file")->required();
  sub->add_option("--data", a.data, "Dataset holding the seed episode")->required();
  sub->add_option("--episode", a.episode, "Episode index");
  sub->add_option("--horizon", a.horizon, "Prediction steps")->check(CLI::PositiveNumber);
  sub->add_option("--out", a.out, "Trajectory CSV");
  sub->add_option("--svg", a.svg, "Plot file");
}

void add_rollout(CLI::App& app, const GlobalOptions& g) {
  auto a = std::make_shared<PredictArgs>();
  a->out = "rollout.csv";
  a->svg = "rollout.svg";
  auto* sub = app.add_subcommand("rollout", "Deterministic multistep prediction from an episode's first window");
  add_predict_options(sub, *a);
  on_run(sub, [a, &g] {
    Session s(g);
    const auto ck = load_checkpoint(a->checkpoint);
    s.adopt_checkpoint(ck.config);
    s.finalize();
    const auto data = read_episodes(a->data);
    const auto& ep = pick(data, a->episode);
    check_dimensions(ck.model, ep);
    const int tw = ck.model.window_length();
    const auto r = rollout::predict(ck.model, seed_window(ep, tw), ep.agents, ep.context, a->horizon);
    const json params{{"checkpoint", file_name(a->checkpoint)},
                      {"data", file_name(a->data)},
                      {"episode", a->episode},
                      {"horizon", a->horizon}};
    const auto csv = s.output(a->out);
    s.write_text(csv, rollout::rollout_csv(r));
    s.write_sidecar(csv, "rollout", params);
    std::cout << "wrote " << csv.string() << "\n";
    plot::PlotSpec spec;
    spec.truth = &ep;
    spec.prediction = &r;
    spec.anchor = positions(ep, tw - 1);
    spec.context = ep.context_spec();
    spec.title = std::string(gen::to_string(ep.tag)) + " episode " + std::to_string(a->episode) + ", " +
                 std::to_string(a->horizon) + "-step rollout";
    if (!a->svg.empty()) write_plot(s, a->svg, "rollout", params, spec);
  });
}

void add_sample(CLI::App& app, const GlobalOptions& g) {
  struct Args : PredictArgs {
    Flag<int> samples;
    Flag<double> dropout, sigma;
    std::string hist = "histograms.csv";
  };
  auto a = std::make_shared<Args>();
  a->out = "samples.csv";
  a->svg = "samples.svg";
  auto* sub = app.add_subcommand("sample", "Stochastic rollouts with test-time dropout and input noise");
  add_predict_options(sub, *a);
  add(sub, "--samples", a->samples, "Sample count S");
  add(sub, "--dropout", a->dropout, "Dropout probability p at inference");
  add(sub, "--sigma", a->sigma, "Std of additive input noise");
  sub->add_option("--hist", a->hist, "Histogram CSV at eval.histogram_step (needs S >= 30)");
  on_run(sub, [a, &g] {
    Session s(g);
    const auto ck = load_checkpoint(a->checkpoint);
    s.adopt_checkpoint(ck.config);
    auto& cfg = s.config();
    a->samples.apply(cfg.noise.samples);
    a->dropout.apply(cfg.noise.dropout);
    a->sigma.apply(cfg.noise.sigma);
    s.finalize();
    const auto data = read_episodes(a->data);
    const auto& ep = pick(data, a->episode);
    check_dimensions(ck.model, ep);
    const int tw = ck.model.window_length();
    const auto r = rollout::sample_plus(ck.model, seed_window(ep, tw), ep.agents, ep.context, a->horizon, cfg.noise);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    const json params{{"checkpoint", file_name(a->checkpoint)},
                      {"data", file_name(a->data)},
                      {"episode", a->episode},
                      {"horizon", a->horizon}};
    const auto csv = s.output(a->out);
    s.write_text(csv, rollout::rollout_csv(r));
    s.write_sidecar(csv, "sample", params);
    std::cout << "wrote " << csv.string() << " (" << r.sample_count() << " samples)\n";
    for (int t : {5, 30}) {
      if (t <= a->horizon) {
        std::cout << "mean positional dispersion at step " << t << ": " << fmt(r.mean_position_dispersion(t - 1))
                  << "\n";
      }
    }
    const int step = cfg.eval.histogram_step;
    if (!a->hist.empty()) {
      if (r.sample_count() >= 30 && step <= a->horizon) {
        const auto hs = rollout::marginal_histograms(r, step - 1, cfg.eval.histogram_bins);
        const auto path = s.output(a->hist);
        s.write_text(path, rollout::histogram_csv(hs));
        s.write_sidecar(path, "sample", params);
        std::cout << "wrote " << path.string() << " (step " << step << ")\n";
      } else {
        std::cerr << "note: histograms need at least 30 samples and a horizon reaching step " << step << "\n";
      }
    }
    plot::PlotSpec spec;
    spec.truth = &ep;
    spec.prediction = &r;
    spec.anchor = positions(ep, tw - 1);
    spec.context = ep.context_spec();
    spec.title = std::to_string(r.sample_count()) + " samples, p=" + fmt(cfg.noise.dropout) +
                 ", sigma=" + fmt(cfg.noise.sigma);
    if (!a->svg.empty()) write_plot(s, a->svg, "sample", params, spec);
  });
}

void add_clone(CLI::App& app, const GlobalOptions& g) {
  struct Args {
    std::string checkpoint;
    int steps = 50;
    std::string out = "clone.csv";
    std::string svg = "clone.svg";
  };
  auto a = std::make_shared<Args>();
  auto* sub = app.add_subcommand("clone", "Closed-loop control of point-mass agents by predicted velocities");
  sub->add_option("--checkpoint", a->checkpoint, "Checkpoint file")->required();
  sub->add_option("--steps", a->steps, "Control steps")->check(CLI::PositiveNumber);
  sub->add_option("--out", a->out, "Executed trajectory CSV");
  sub->add_option("--svg", a->svg, "Plot file");
  on_run(sub, [a, &g] {
    Session s(g);
    const auto ck = load_checkpoint(a->checkpoint);
    s.adopt_checkpoint(ck.config);
    s.finalize();
    const auto& cfg = s.config();
    const std::uint64_t seed = s.seed_or(0);
    // The simulated episode provides the spawn, the environment and a reference.
    const auto reference = gen::simulate(cfg.dataset, cfg.sim, seed);
    const auto initial = reference.frame(0);
    const rollout::PlantConfig plant{cfg.sim.dt, cfg.sim.max_speed(cfg.dataset), cfg.sim.arena_half_width};
    const auto res = rollout::clone_swarm(ck.model, initial, reference.context, a->steps, plant);
    const auto& ex = res.executed;
    const json params{{"checkpoint", file_name(a->checkpoint)}, {"spawn_seed", seed}, {"steps", a->steps}};
    const auto csv = s.output(a->out);
    s.write_text(csv, rollout::trajectory_csv(ex));
    s.write_sidecar(csv, "clone", params);
    std::cout << "wrote " << csv.string() << "\n";

    const auto ctx = reference.context_spec();
    if (cfg.dataset == gen::ModelTag::chaser) {
      std::cout << "circumradius " << fmt(gen::circumradius(ex.frame(0))) << " -> "
                << fmt(gen::circumradius(ex.frame(ex.steps - 1))) << "\n";
    } else if (ctx.goal) {
      const auto goal_distance = [&](int t) {
        double acc = 0.0;
        for (const auto& agent : ex.frame(t)) acc += (agent.position - *ctx.goal).norm();
        return acc / ex.agents;
      };
      std::cout << "mean goal distance " << fmt(goal_distance(0)) << " -> " << fmt(goal_distance(ex.steps - 1))
                << "\n";
    }

    rollout::RolloutResult path;
    path.horizon = a->steps;
    path.agents = ex.agents;
    path.state_dim = ex.state_dim;
    path.predicted.assign(ex.states.begin() + static_cast<std::ptrdiff_t>(ex.agents * ex.state_dim),
                          ex.states.end());
    plot::PlotSpec spec;
    spec.truth = &reference;
    spec.prediction = &path;
    spec.anchor = positions(ex, 0);
    spec.context = ctx;
    spec.title = "closed-loop " + std::string(gen::to_string(cfg.dataset)) + " policy, " +
                 std::to_string(a->steps) + " steps";
    if (!a->svg.empty()) write_plot(s, a->svg, "clone", params, spec);
  });
}

void add_plot(CLI::App& app, const GlobalOptions& g) {
  struct Args {
    std::string data, checkpoint;
    int episode = 0;
    Flag<int> horizon;
    std::string out = "plot.svg";
  };
  auto a = std::make_shared<Args>();
  auto* sub = app.add_subcommand("plot", "SVG of an episode, optionally with a model's prediction");
  sub->add_option("--data", a->data, "Dataset file")->required();
  sub->add_option("--episode", a->episode, "Episode index");
  sub->add_option("--checkpoint", a->checkpoint, "Overlay this model's rollout");
  add(sub, "--horizon", a->horizon, "Prediction steps (default: to the end of the episode)");
  sub->add_option("--out", a->out, "Plot file");
  on_run(sub, [a, &g] {
    Session s(g);
    std::optional<Checkpoint> ck;
    if (!a->checkpoint.empty()) {
      ck = load_checkpoint(a->checkpoint);
      s.adopt_checkpoint(ck->config);
    }
    s.finalize();
    const auto data = read_episodes(a->data);
    const auto& ep = pick(data, a->episode);
    json params{{"data", file_name(a->data)}, {"episode", a->episode}};
    plot::PlotSpec spec;
    spec.truth = &ep;
    spec.context = ep.context_spec();
    spec.title = std::string(gen::to_string(ep.tag)) + " episode " + std::to_string(a->episode);
    std::optional<rollout::RolloutResult> r;
    if (ck) {
      check_dimensions(ck->model, ep);
      const int tw = ck->model.window_length();
      const int horizon = a->horizon.set() ? a->horizon.value : ep.steps - tw;
      if (horizon < 1) throw ParameterError("plot: horizon must be >= 1");
      r = rollout::predict(ck->model, seed_window(ep, tw), ep.agents, ep.context, horizon);
      spec.prediction = &*r;
      spec.anchor = positions(ep, tw - 1);
      params["checkpoint"] = file_name(a->checkpoint);
      params["horizon"] = horizon;
    }
    write_plot(s, a->out, "plot", params, spec);
  });
}

}  // namespace

void add_commands(CLI::App& app, const GlobalOptions& globals, std::function<void()>& action) {
  pending = &action;
  add_generate(app, globals);
  add_train(app, globals);
  add_eval(app, globals);
  add_ablate(app, globals);
  add_sweep(app, globals);
  add_rollout(app, globals);
  add_sample(app, globals);
  add_clone(app, globals);
  add_plot(app, globals);
}

}  // namespace swarmnet::cli
