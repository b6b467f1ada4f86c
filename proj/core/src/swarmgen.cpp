#include "swarmnet/swarmgen.hpp"

#include <algorithm>
#include <numbers>

#include "swarmnet/errors.hpp"

namespace swarmnet::gen {

namespace {

Vec2 clip_speed(Vec2 v, double max_speed) {
  const double s = v.norm();
  if (s > max_speed && s > 0.0) return v * (max_speed / s);
  return v;
}

Vec2 unit_or_zero(Vec2 v) {
  const double n = v.norm();
  return n > 1e-12 ? v * (1.0 / n) : Vec2{};
}

bool finite(const AgentState& a) {
  return std::isfinite(a.position.x) && std::isfinite(a.position.y) &&
         std::isfinite(a.velocity.x) && std::isfinite(a.velocity.y);
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Rng stream(std::uint64_t seed, std::uint32_t which) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), which};
  return Rng(seq);
}

Episode record(ModelTag tag, const SimConfig& cfg, std::uint64_t seed, const ContextSpec& ctx,
               std::vector<AgentState> agents) {
  Episode ep;
  ep.steps = cfg.steps;
  ep.agents = cfg.agents;
  ep.tag = tag;
  ep.seed = seed;
  ep.context = ctx.encode(cfg.max_obstacles);
  ep.states.reserve(static_cast<std::size_t>(cfg.steps) * cfg.agents * kStateDim);
  for (int t = 0; t < cfg.steps; ++t) {
    if (t > 0) {
      switch (tag) {
        case ModelTag::boids: agents = boids_step(agents, ctx, cfg); break;
        case ModelTag::helbing: agents = helbing_step(agents, ctx, cfg); break;
        case ModelTag::chaser: agents = chaser_step(agents, cfg); break;
      }
    }
    for (const auto& a : agents) {
      if (!finite(a)) throw SimulationDivergedError(t);
      ep.states.push_back(static_cast<float>(a.position.x));
      ep.states.push_back(static_cast<float>(a.position.y));
      ep.states.push_back(static_cast<float>(a.velocity.x));
      ep.states.push_back(static_cast<float>(a.velocity.y));
    }
  }
  return ep;
}

}  // namespace

std::vector<float> ContextSpec::encode(int max_obstacles) const {
  if (static_cast<int>(obstacles.size()) > max_obstacles) {
    throw ConfigError("context holds " + std::to_string(obstacles.size()) +
                      " obstacles but only " + std::to_string(max_obstacles) + " slots");
  }
  std::vector<float> out(static_cast<std::size_t>(context_dim(max_obstacles)), 0.0f);
  for (std::size_t k = 0; k < obstacles.size(); ++k) {
    if (!(obstacles[k].radius > 0.0)) throw ConfigError("obstacle radius must be positive");
    out[3 * k] = static_cast<float>(obstacles[k].center.x);
    out[3 * k + 1] = static_cast<float>(obstacles[k].center.y);
    out[3 * k + 2] = static_cast<float>(obstacles[k].radius);
  }
  if (goal) {
    out[out.size() - 2] = static_cast<float>(goal->x);
    out[out.size() - 1] = static_cast<float>(goal->y);
  }
  return out;
}

ContextSpec ContextSpec::decode(std::span<const float> encoded, bool has_goal) {
  if (encoded.size() < 2 || (encoded.size() - 2) % 3 != 0) {
    throw ConfigError("context vector length " + std::to_string(encoded.size()) +
                      " is not 3k+2");
  }
  ContextSpec ctx;
  const std::size_t slots = (encoded.size() - 2) / 3;
  for (std::size_t k = 0; k < slots; ++k) {
    if (encoded[3 * k + 2] > 0.0f) {
      ctx.obstacles.push_back({{encoded[3 * k], encoded[3 * k + 1]}, encoded[3 * k + 2]});
    }
  }
  if (has_goal) ctx.goal = Vec2{encoded[encoded.size() - 2], encoded[encoded.size() - 1]};
  return ctx;
}

std::string_view to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::boids: return "boids";
    case ModelTag::helbing: return "helbing";
    case ModelTag::chaser: return "chaser";
  }
  return "unknown";
}

ModelTag parse_model_tag(std::string_view name) {
  if (name == "boids") return ModelTag::boids;
  if (name == "helbing") return ModelTag::helbing;
  if (name == "chaser") return ModelTag::chaser;
  throw ConfigError("unknown swarm model '" + std::string(name) + "' (boids|helbing|chaser)");
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("sim.dt must be positive");
  if (steps < 8) throw ConfigError("sim.steps must be at least 8");
  if (agents < 1) throw ConfigError("sim.agents must be at least 1");
  if (max_obstacles < 0) throw ConfigError("sim.max_obstacles must be non-negative");
  if (!(arena_half_width > 0.0)) throw ConfigError("sim.arena_half_width must be positive");
  if (!(boids.max_speed > 0.0) || !(helbing.max_speed > 0.0) || !(chaser.speed > 0.0)) {
    throw ConfigError("simulator speeds must be positive");
  }
}

double SimConfig::max_speed(ModelTag tag) const {
  switch (tag) {
    case ModelTag::boids: return boids.max_speed;
    case ModelTag::helbing: return helbing.max_speed;
    case ModelTag::chaser: return chaser.speed;
  }
  return 0.0;
}

std::vector<AgentState> Episode::frame(int t) const {
  std::vector<AgentState> out(static_cast<std::size_t>(agents));
  for (int i = 0; i < agents; ++i) {
    out[i].position = {at(t, i, 0), at(t, i, 1)};
    out[i].velocity = {at(t, i, 2), at(t, i, 3)};
  }
  return out;
}

Vec2 direction_or_fallback(Vec2 v) {
  const double n = v.norm();
  return n > 0.0 ? v * (1.0 / n) : Vec2{1.0, 0.0};
}

std::vector<AgentState> boids_step(std::span<const AgentState> agents, const ContextSpec& ctx,
                                   const SimConfig& cfg) {
  if (agents.empty()) throw ConfigError("boids_step needs at least one agent");
  if (!ctx.goal) throw ConfigError("boids_step needs a goal in the context");
  const auto& p = cfg.boids;
  std::vector<AgentState> next(agents.begin(), agents.end());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto& self = agents[i];
    Vec2 center, mean_velocity, separation;
    int neighbors = 0;
    for (std::size_t j = 0; j < agents.size(); ++j) {
      if (j == i) continue;
      const Vec2 offset = self.position - agents[j].position;
      const double d = offset.norm();
      if (d < p.perception_radius) {
        center += agents[j].position;
        mean_velocity += agents[j].velocity;
        ++neighbors;
      }
      if (d < p.separation_radius) {
        separation += direction_or_fallback(offset) * (1.0 - d / p.separation_radius);
      }
    }
    Vec2 cohesion, alignment;
    if (neighbors > 0) {
      const double inv = 1.0 / neighbors;
      cohesion = center * inv - self.position;
      alignment = mean_velocity * inv - self.velocity;
    }
    const Vec2 goal_seek = unit_or_zero(*ctx.goal - self.position);
    Vec2 avoid;
    for (const auto& ob : ctx.obstacles) {
      const Vec2 offset = self.position - ob.center;
      const double surface = offset.norm() - ob.radius;
      if (surface < p.obstacle_margin) {
        avoid += direction_or_fallback(offset) * (1.0 - surface / p.obstacle_margin);
      }
    }
    const Vec2 accel = p.cohesion_weight * cohesion + p.separation_weight * separation +
                       p.alignment_weight * alignment + p.goal_weight * goal_seek +
                       p.obstacle_weight * avoid;
    next[i].velocity = clip_speed(self.velocity + accel * cfg.dt, p.max_speed);
    next[i].position = self.position + next[i].velocity * cfg.dt;
  }
  return next;
}

std::vector<AgentState> helbing_step(std::span<const AgentState> agents, const ContextSpec& ctx,
                                     const SimConfig& cfg) {
  if (agents.empty()) throw ConfigError("helbing_step needs at least one agent");
  const auto& p = cfg.helbing;
  std::vector<AgentState> next(agents.begin(), agents.end());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto& self = agents[i];
    Vec2 desired;
    if (ctx.goal) desired = unit_or_zero(*ctx.goal - self.position) * p.desired_speed;
    Vec2 accel = (desired - self.velocity) * (1.0 / p.relaxation_time);
    for (std::size_t j = 0; j < agents.size(); ++j) {
      if (j == i) continue;
      const Vec2 offset = self.position - agents[j].position;
      const double d = offset.norm();
      accel += direction_or_fallback(offset) *
               (p.repulsion_strength * std::exp((2.0 * p.agent_radius - d) / p.repulsion_range));
    }
    for (const auto& ob : ctx.obstacles) {
      const Vec2 offset = self.position - ob.center;
      const double d = offset.norm();
      accel += direction_or_fallback(offset) *
               (p.repulsion_strength * std::exp((p.agent_radius + ob.radius - d) / p.repulsion_range));
    }
    next[i].velocity = clip_speed(self.velocity + accel * cfg.dt, p.max_speed);
    next[i].position = self.position + next[i].velocity * cfg.dt;
  }
  return next;
}

std::vector<AgentState> chaser_step(std::span<const AgentState> agents, const SimConfig& cfg) {
  if (agents.size() < 2) throw ConfigError("chaser needs at least two agents");
  const auto& p = cfg.chaser;
  const double max_turn = p.max_turn_rate * cfg.dt;
  const std::size_t n = agents.size();
  std::vector<AgentState> next(agents.begin(), agents.end());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& self = agents[i];
    const Vec2 pursuit = agents[(i + 1) % n].position - self.position;
    const bool moving = self.velocity.norm() > 0.0;
    double heading = moving ? std::atan2(self.velocity.y, self.velocity.x)
                            : std::atan2(pursuit.y, pursuit.x);
    if (pursuit.norm() > 1e-12) {
      const double wanted = std::atan2(pursuit.y, pursuit.x);
      const double diff = std::remainder(wanted - heading, 2.0 * std::numbers::pi);
      heading += std::clamp(diff, -max_turn, max_turn);
    }
    next[i].velocity = {p.speed * std::cos(heading), p.speed * std::sin(heading)};
    next[i].position = self.position + next[i].velocity * cfg.dt;
  }
  return next;
}

ContextSpec sample_context(ModelTag tag, const SimConfig& cfg, Rng& rng) {
  ContextSpec ctx;
  if (tag == ModelTag::chaser) return ctx;
  const double a = cfg.arena_half_width;
  for (int k = 0; k < cfg.max_obstacles; ++k) {
    Obstacle ob;
    ob.center = {uniform(rng, -0.15 * a, 0.15 * a), uniform(rng, -0.15 * a, 0.15 * a)};
    ob.radius = uniform(rng, 0.8, 1.5);
    ctx.obstacles.push_back(ob);
  }
  ctx.goal = Vec2{uniform(rng, 0.5 * a, 0.8 * a), uniform(rng, -0.3 * a, 0.3 * a)};
  return ctx;
}

std::vector<AgentState> spawn_agents(ModelTag tag, const SimConfig& cfg, Rng& rng) {
  std::vector<AgentState> agents(static_cast<std::size_t>(cfg.agents));
  const double a = cfg.arena_half_width;
  if (tag == ModelTag::chaser) {
    const Vec2 center{uniform(rng, -0.2 * a, 0.2 * a), uniform(rng, -0.2 * a, 0.2 * a)};
    const double radius = uniform(rng, 0.6 * cfg.chaser.spawn_radius, cfg.chaser.spawn_radius);
    const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < cfg.agents; ++i) {
      const double angle = phase + 2.0 * std::numbers::pi * i / cfg.agents;
      agents[i].position = center + Vec2{std::cos(angle), std::sin(angle)} * radius;
      agents[i].velocity = Vec2{-std::sin(angle), std::cos(angle)} * cfg.chaser.speed;
    }
    return agents;
  }
  for (auto& ag : agents) {
    ag.position = {uniform(rng, -0.8 * a, -0.5 * a), uniform(rng, -0.25 * a, 0.25 * a)};
    ag.velocity = {uniform(rng, -0.2, 0.2), uniform(rng, -0.2, 0.2)};
  }
  return agents;
}

Episode simulate(ModelTag tag, const SimConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng env = stream(seed, 1);
  const ContextSpec ctx = sample_context(tag, cfg, env);
  return simulate_in(tag, cfg, seed, ctx);
}

Episode simulate_in(ModelTag tag, const SimConfig& cfg, std::uint64_t seed, const ContextSpec& ctx) {
  cfg.validate();
  if (tag == ModelTag::chaser && cfg.agents < 2) throw ConfigError("chaser needs at least two agents");
  Rng agents_rng = stream(seed, 2);
  return record(tag, cfg, seed, ctx, spawn_agents(tag, cfg, agents_rng));
}

double circumradius(std::span<const AgentState> agents) {
  if (agents.empty()) return 0.0;
  Vec2 centroid;
  for (const auto& a : agents) centroid += a.position;
  centroid *= 1.0 / static_cast<double>(agents.size());
  double r = 0.0;
  for (const auto& a : agents) r = std::max(r, (a.position - centroid).norm());
  return r;
}

}  // namespace swarmnet::gen
