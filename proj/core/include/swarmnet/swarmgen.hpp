#pragma once

// Ground-truth swarm simulators: Reynolds boids with goal seeking and soft
// obstacle avoidance, a Helbing-style social-force model, and cyclic-pursuit
// chasers. All three are explicit-Euler and fully determined by their seed.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace swarmnet::gen {

using Rng = std::mt19937_64;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  double norm() const { return std::hypot(x, y); }
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
  friend bool operator==(Vec2, Vec2) = default;
};

struct AgentState {
  Vec2 position;
  Vec2 velocity;  // arena units per unit time; positions advance by velocity * dt
  friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct Obstacle {
  Vec2 center;
  double radius = 1.0;
};

/// Static environment of an episode.
struct ContextSpec {
  std::vector<Obstacle> obstacles;
  std::optional<Vec2> goal;

  /// Fixed-length encoding: (cx, cy, r) per obstacle slot, then (gx, gy).
  /// Unused slots and an absent goal are zero-filled.
  std::vector<float> encode(int max_obstacles) const;
  static ContextSpec decode(std::span<const float> encoded, bool has_goal);
};

constexpr int context_dim(int max_obstacles) { return 3 * max_obstacles + 2; }

enum class ModelTag : std::uint8_t { boids = 0, helbing = 1, chaser = 2 };

std::string_view to_string(ModelTag tag);
/// Throws ConfigError on an unknown name.
ModelTag parse_model_tag(std::string_view name);

struct BoidsParams {
  double perception_radius = 3.0;
  double separation_radius = 1.0;
  double cohesion_weight = 0.5;
  double separation_weight = 2.0;
  double alignment_weight = 0.3;
  double goal_weight = 1.0;
  double obstacle_weight = 4.0;
  /// Repulsion fades linearly to zero this far outside an obstacle's surface.
  double obstacle_margin = 1.5;
  double max_speed = 2.0;
};

struct HelbingParams {
  double desired_speed = 1.5;  // v0
  double relaxation_time = 0.5;  // tau
  double repulsion_strength = 2.0;  // A
  double repulsion_range = 0.5;  // B
  double agent_radius = 0.3;  // r
  /// Speed cap; defaults to 2 * v0.
  double max_speed = 3.0;
};

struct ChaserParams {
  double speed = 1.5;
  double max_turn_rate = 2.0;  // rad per unit time
  double spawn_radius = 5.0;
};

struct SimConfig {
  double dt = 0.1;
  int steps = 50;
  int agents = 5;
  double arena_half_width = 10.0;
  int max_obstacles = 1;
  BoidsParams boids;
  HelbingParams helbing;
  ChaserParams chaser;

  void validate() const;
  double max_speed(ModelTag tag) const;
  int context_dim() const { return gen::context_dim(max_obstacles); }
};

constexpr int kStateDim = 4;

/// One demonstration: states[t][agent][channel] with channels (px, py, vx, vy).
struct Episode {
  int steps = 0;
  int agents = 0;
  int state_dim = kStateDim;
  std::vector<float> states;
  std::vector<float> context;
  ModelTag tag = ModelTag::boids;
  std::uint64_t seed = 0;

  float at(int t, int agent, int channel) const {
    return states[(static_cast<std::size_t>(t) * agents + agent) * state_dim + channel];
  }
  std::vector<AgentState> frame(int t) const;
  ContextSpec context_spec() const { return ContextSpec::decode(context, tag != ModelTag::chaser); }
  friend bool operator==(const Episode&, const Episode&) = default;
};

/// Undefined directions (coincident points) resolve to +x.
Vec2 direction_or_fallback(Vec2 v);

std::vector<AgentState> boids_step(std::span<const AgentState> agents, const ContextSpec& ctx,
                                   const SimConfig& cfg);
std::vector<AgentState> helbing_step(std::span<const AgentState> agents, const ContextSpec& ctx,
                                     const SimConfig& cfg);
std::vector<AgentState> chaser_step(std::span<const AgentState> agents, const SimConfig& cfg);

/// Randomized environment for one episode (chasers get an empty context).
ContextSpec sample_context(ModelTag tag, const SimConfig& cfg, Rng& rng);
std::vector<AgentState> spawn_agents(ModelTag tag, const SimConfig& cfg, Rng& rng);

/// Full episode from a seed. The environment and the agent spawn draw from
/// independent streams derived from the seed.
Episode simulate(ModelTag tag, const SimConfig& cfg, std::uint64_t seed);
/// Same agent spawn as simulate(tag, cfg, seed) but in a caller-chosen environment.
Episode simulate_in(ModelTag tag, const SimConfig& cfg, std::uint64_t seed, const ContextSpec& ctx);

/// Largest distance from the centroid.
double circumradius(std::span<const AgentState> agents);

}  // namespace swarmnet::gen
