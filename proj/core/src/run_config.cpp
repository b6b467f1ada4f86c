#include "swarmnet/run_config.hpp"

#include <set>

#include <json.hpp>

#include "binary_io.hpp"
#include "swarmnet/errors.hpp"

namespace swarmnet {

namespace {

using json = nlohmann::json;

// Reads the keys of one JSON object and rejects any it was not asked about.
class Section {
 public:
  Section(const json& parent, const std::string& key, const std::string& path)
      : path_(path.empty() ? key : path + "." + key) {
    if (parent.contains(key)) {
      node_ = &parent.at(key);
      if (!node_->is_object()) throw ConfigError("'" + path_ + "' must be an object");
    }
  }
  explicit Section(const json& root) : node_(&root) {
    if (!root.is_object()) throw ConfigError("run configuration must be a JSON object");
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    known_.insert(key);
    if (node_ == nullptr || !node_->contains(key)) return;
    const json& v = node_->at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError("");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) throw ConfigError("");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError("");
      }
      out = v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError("'" + field(key) + "' has the wrong type: " + v.dump());
    }
  }

  Section child(const std::string& key) {
    known_.insert(key);
    static const json kEmpty = json::object();
    return Section(node_ != nullptr ? *node_ : kEmpty, key, path_);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    if (node_ == nullptr) return;
    for (const auto& [key, value] : node_->items()) {
      if (!known_.contains(key)) throw ConfigError("unknown configuration key '" + field(key) + "'");
    }
  }

 private:
  const json* node_ = nullptr;
  std::string path_;
  std::set<std::string> known_;
};

template <typename T>
void positive_list(const std::vector<T>& v, const std::string& name) {
  for (const auto& x : v)
    if (x < 1) throw ConfigError("'" + name + "' entries must be >= 1");
}

}  // namespace

void RunConfig::resolve() {
  model.state_dim = gen::kStateDim;
  model.context_dim = sim.context_dim();
}

void RunConfig::validate() const {
  sim.validate();
  model.validate();
  train.validate();
  eval.validate();
  try {
    noise.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (model.state_dim != gen::kStateDim || model.context_dim != sim.context_dim()) {
    throw ConfigError("model dimensions do not match the simulator settings");
  }
}

RunConfig parse_run_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("run configuration is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  Section top(root);

  Section sim = top.child("sim");
  std::string tag(gen::to_string(cfg.dataset));
  sim.get("model", tag);
  cfg.dataset = gen::parse_model_tag(tag);
  sim.get("dt", cfg.sim.dt);
  sim.get("steps", cfg.sim.steps);
  sim.get("agents", cfg.sim.agents);
  sim.get("arena_half_width", cfg.sim.arena_half_width);
  sim.get("max_obstacles", cfg.sim.max_obstacles);
  {
    Section b = sim.child("boids");
    auto& p = cfg.sim.boids;
    b.get("perception_radius", p.perception_radius);
    b.get("separation_radius", p.separation_radius);
    b.get("cohesion_weight", p.cohesion_weight);
    b.get("separation_weight", p.separation_weight);
    b.get("alignment_weight", p.alignment_weight);
    b.get("goal_weight", p.goal_weight);
    b.get("obstacle_weight", p.obstacle_weight);
    b.get("obstacle_margin", p.obstacle_margin);
    b.get("max_speed", p.max_speed);
    b.finish();
  }
  {
    Section h = sim.child("helbing");
    auto& p = cfg.sim.helbing;
    h.get("desired_speed", p.desired_speed);
    h.get("relaxation_time", p.relaxation_time);
    h.get("repulsion_strength", p.repulsion_strength);
    h.get("repulsion_range", p.repulsion_range);
    h.get("agent_radius", p.agent_radius);
    h.get("max_speed", p.max_speed);
    h.finish();
  }
  {
    Section c = sim.child("chaser");
    auto& p = cfg.sim.chaser;
    c.get("speed", p.speed);
    c.get("max_turn_rate", p.max_turn_rate);
    c.get("spawn_radius", p.spawn_radius);
    c.finish();
  }
  sim.finish();

  Section m = top.child("model");
  m.get("conv_layers", cfg.model.conv_layers);
  m.get("kernel_size", cfg.model.kernel_size);
  m.get("conv_filters", cfg.model.conv_filters);
  m.get("encoded_size", cfg.model.encoded_size);
  m.get("mlp_hidden", cfg.model.mlp_hidden);
  m.get("edge_size", cfg.model.edge_size);
  m.get("gc_layers", cfg.model.gc_layers);
  m.get("dropout", cfg.model.dropout);
  std::string encoder = cfg.model.temporal_encoder == model::TemporalEncoder::conv1d ? "conv1d" : "markov";
  m.get("temporal_encoder", encoder);
  if (encoder == "conv1d") {
    cfg.model.temporal_encoder = model::TemporalEncoder::conv1d;
  } else if (encoder == "markov") {
    cfg.model.temporal_encoder = model::TemporalEncoder::markov;
  } else {
    throw ConfigError("'model.temporal_encoder' must be \"conv1d\" or \"markov\", got \"" + encoder + "\"");
  }
  m.get("use_context", cfg.model.use_context);
  m.get("predict_delta", cfg.model.predict_delta);
  m.get("zero_init_output", cfg.model.zero_init_output);
  m.finish();

  Section t = top.child("train");
  t.get("epochs", cfg.train.epochs);
  t.get("batch_size", cfg.train.batch_size);
  t.get("lr", cfg.train.adam.lr);
  t.get("beta1", cfg.train.adam.beta1);
  t.get("beta2", cfg.train.adam.beta2);
  t.get("eps", cfg.train.adam.eps);
  t.get("seed", cfg.train.seed);
  t.get("validation_fraction", cfg.train.validation_fraction);
  t.get("curriculum", cfg.train.curriculum);
  t.get("max_horizon", cfg.train.max_horizon);
  t.get("horizon", cfg.train.horizon);
  t.get("epochs_per_increment", cfg.train.epochs_per_increment);
  t.get("validation_horizon", cfg.train.validation_horizon);
  t.get("windows_per_episode", cfg.train.windows_per_episode);
  t.finish();

  Section n = top.child("noise");
  n.get("dropout", cfg.noise.dropout);
  n.get("sigma", cfg.noise.sigma);
  n.get("samples", cfg.noise.samples);
  n.get("seed", cfg.noise.seed);
  n.finish();

  Section e = top.child("eval");
  e.get("horizons", cfg.eval.horizons);
  e.get("sweep_sizes", cfg.eval.sweep_sizes);
  e.get("sweep_seeds", cfg.eval.sweep_seeds);
  e.get("histogram_bins", cfg.eval.histogram_bins);
  e.get("histogram_step", cfg.eval.histogram_step);
  e.get("jobs", cfg.eval.jobs);
  e.finish();

  top.finish();
  positive_list(cfg.model.mlp_hidden, "model.mlp_hidden");
  cfg.resolve();
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(detail::read_file(path)); }

std::string to_json(const RunConfig& cfg) {
  const auto& s = cfg.sim;
  json j;
  j["sim"] = {
      {"model", std::string(gen::to_string(cfg.dataset))},
      {"dt", s.dt},
      {"steps", s.steps},
      {"agents", s.agents},
      {"arena_half_width", s.arena_half_width},
      {"max_obstacles", s.max_obstacles},
      {"boids",
       {{"perception_radius", s.boids.perception_radius},
        {"separation_radius", s.boids.separation_radius},
        {"cohesion_weight", s.boids.cohesion_weight},
        {"separation_weight", s.boids.separation_weight},
        {"alignment_weight", s.boids.alignment_weight},
        {"goal_weight", s.boids.goal_weight},
        {"obstacle_weight", s.boids.obstacle_weight},
        {"obstacle_margin", s.boids.obstacle_margin},
        {"max_speed", s.boids.max_speed}}},
      {"helbing",
       {{"desired_speed", s.helbing.desired_speed},
        {"relaxation_time", s.helbing.relaxation_time},
        {"repulsion_strength", s.helbing.repulsion_strength},
        {"repulsion_range", s.helbing.repulsion_range},
        {"agent_radius", s.helbing.agent_radius},
        {"max_speed", s.helbing.max_speed}}},
      {"chaser",
       {{"speed", s.chaser.speed}, {"max_turn_rate", s.chaser.max_turn_rate}, {"spawn_radius", s.chaser.spawn_radius}}},
  };
  const auto& m = cfg.model;
  j["model"] = {
      {"conv_layers", m.conv_layers},
      {"kernel_size", m.kernel_size},
      {"conv_filters", m.conv_filters},
      {"encoded_size", m.encoded_size},
      {"mlp_hidden", m.mlp_hidden},
      {"edge_size", m.edge_size},
      {"gc_layers", m.gc_layers},
      {"dropout", m.dropout},
      {"temporal_encoder", m.temporal_encoder == model::TemporalEncoder::conv1d ? "conv1d" : "markov"},
      {"use_context", m.use_context},
      {"predict_delta", m.predict_delta},
      {"zero_init_output", m.zero_init_output},
  };
  const auto& t = cfg.train;
  j["train"] = {
      {"epochs", t.epochs},
      {"batch_size", t.batch_size},
      {"lr", t.adam.lr},
      {"beta1", t.adam.beta1},
      {"beta2", t.adam.beta2},
      {"eps", t.adam.eps},
      {"seed", t.seed},
      {"validation_fraction", t.validation_fraction},
      {"curriculum", t.curriculum},
      {"max_horizon", t.max_horizon},
      {"horizon", t.horizon},
      {"epochs_per_increment", t.epochs_per_increment},
      {"validation_horizon", t.validation_horizon},
      {"windows_per_episode", t.windows_per_episode},
  };
  j["noise"] = {
      {"dropout", cfg.noise.dropout},
      {"sigma", cfg.noise.sigma},
      {"samples", cfg.noise.samples},
      {"seed", cfg.noise.seed},
  };
  j["eval"] = {
      {"horizons", cfg.eval.horizons},
      {"sweep_sizes", cfg.eval.sweep_sizes},
      {"sweep_seeds", cfg.eval.sweep_seeds},
      {"histogram_bins", cfg.eval.histogram_bins},
      {"histogram_step", cfg.eval.histogram_step},
      {"jobs", cfg.eval.jobs},
  };
  return j.dump(2) + "\n";
}

}  // namespace swarmnet
