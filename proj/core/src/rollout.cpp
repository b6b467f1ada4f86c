#include "swarmnet/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "swarmnet/errors.hpp"
#include "swarmnet/ops.hpp"
#include "swarmnet/trainer.hpp"
#include "text.hpp"

namespace swarmnet::rollout {

namespace {

constexpr std::uint32_t kNoiseStream = 6;
constexpr std::uint32_t kMaskStream = 7;

diff::Rng stream_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return diff::Rng(seq);
}

Tensor seed_windows(const StepPredictor& model, std::span<const float> seed_window, int agents,
                    std::span<const float> context, int copies) {
  const int tw = model.window_length();
  const int d = model.state_dim();
  if (agents < 1 || seed_window.size() != static_cast<std::size_t>(tw) * agents * d) {
    throw ConfigError("seed window holds " + std::to_string(seed_window.size()) + " values; model needs [" +
                      std::to_string(tw) + " x " + std::to_string(agents) + " x " + std::to_string(d) + "]");
  }
  if (static_cast<int>(context.size()) != model.context_dim()) {
    throw ConfigError("context has " + std::to_string(context.size()) + " values; model needs " +
                      std::to_string(model.context_dim()));
  }
  Tensor one = model::make_windows(seed_window, tw, agents, d, context, tw, 0, 1);
  if (copies == 1) return one;
  const auto& v = one.values();
  std::vector<float> rep;
  rep.reserve(v.size() * static_cast<std::size_t>(copies));
  for (int s = 0; s < copies; ++s) rep.insert(rep.end(), v.begin(), v.end());
  diff::Shape shape = one.shape();
  shape[0] = static_cast<std::size_t>(copies);
  return Tensor(shape, std::move(rep));
}

RolloutResult empty_result(RolloutMode mode, int horizon, int agents, int d) {
  RolloutResult r;
  r.mode = mode;
  r.horizon = horizon;
  r.agents = agents;
  r.state_dim = d;
  return r;
}

}  // namespace

void NoiseConfig::validate() const {
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ParameterError("noise.dropout must lie in [0, 1)");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ParameterError("noise.sigma must be >= 0");
  if (samples < 1) throw ParameterError("noise.samples must be >= 1");
}

int RolloutResult::sample_count() const {
  const std::size_t frame = static_cast<std::size_t>(horizon) * agents * state_dim;
  return frame == 0 ? 0 : static_cast<int>(samples.size() / frame);
}

float RolloutResult::sample(int s, int t, int agent, int channel) const {
  return samples[((static_cast<std::size_t>(s) * horizon + t) * agents + agent) * state_dim + channel];
}

float RolloutResult::at(int t, int agent, int channel) const {
  return predicted[(static_cast<std::size_t>(t) * agents + agent) * state_dim + channel];
}

double RolloutResult::mean_position_dispersion(int t) const {
  if (dispersion.empty()) return 0.0;
  double acc = 0.0;
  for (int i = 0; i < agents; ++i) {
    const std::size_t base = (static_cast<std::size_t>(t) * agents + i) * state_dim;
    acc += std::hypot(static_cast<double>(dispersion[base]), static_cast<double>(dispersion[base + 1]));
  }
  return acc / agents;
}

RolloutResult predict(const StepPredictor& model, std::span<const float> seed_window, int agents,
                      std::span<const float> context, int horizon) {
  if (horizon < 1) throw ParameterError("predict: horizon must be >= 1");
  diff::NoTapeScope no_tape;
  Tensor windows = seed_windows(model, seed_window, agents, context, 1);
  auto preds = train::multistep_unroll(model, windows, horizon, nullptr);
  auto r = empty_result(RolloutMode::deterministic, horizon, agents, model.state_dim());
  for (const auto& p : preds) r.predicted.insert(r.predicted.end(), p.values().begin(), p.values().end());
  return r;
}

RolloutResult sample_plus(const SwarmNet& model, std::span<const float> seed_window, int agents,
                          std::span<const float> context, int horizon, const NoiseConfig& noise) {
  noise.validate();
  if (horizon < 1) throw ParameterError("sample_plus: horizon must be >= 1");
  diff::NoTapeScope no_tape;
  const SwarmNet net = model.with_dropout(noise.dropout);
  const int s_count = noise.samples;
  const int d = net.state_dim();
  const Tensor windows = seed_windows(net, seed_window, agents, context, 1);

  auto mask_rng = stream_rng(noise.seed, kMaskStream);
  auto noise_rng = stream_rng(noise.seed, kNoiseStream);
  std::function<Tensor(const Tensor&)> perturb;
  if (noise.sigma > 0.0) {
    perturb = [&](const Tensor& w) {
      std::normal_distribution<double> gauss(0.0, noise.sigma);
      std::vector<float> eps(w.numel(), 0.0f);
      const std::size_t c = w.dim(3);
      for (std::size_t k = 0; k < eps.size(); ++k) {
        if (k % c < static_cast<std::size_t>(d)) eps[k] = static_cast<float>(gauss(noise_rng));
      }
      return diff::add(w, Tensor(w.shape(), std::move(eps)));
    };
  }

  auto r = empty_result(RolloutMode::stochastic, horizon, agents, d);
  const std::size_t frame = static_cast<std::size_t>(agents) * d;
  r.samples.reserve(static_cast<std::size_t>(s_count) * horizon * frame);
  // One rollout per sample: batching samples would put identical inputs on
  // different GEMM rows, which need not round identically.
  for (int s = 0; s < s_count; ++s) {
    const auto preds =
        train::multistep_unroll(net, windows, horizon, noise.dropout > 0.0 ? &mask_rng : nullptr, perturb);
    for (const auto& p : preds) r.samples.insert(r.samples.end(), p.values().begin(), p.values().end());
  }
  r.predicted.assign(static_cast<std::size_t>(horizon) * frame, 0.0f);
  r.dispersion.assign(r.predicted.size(), 0.0f);
  for (std::size_t k = 0; k < r.predicted.size(); ++k) {
    double mean = 0.0;
    for (int s = 0; s < s_count; ++s) mean += r.samples[static_cast<std::size_t>(s) * r.predicted.size() + k];
    mean /= s_count;
    double var = 0.0;
    for (int s = 0; s < s_count; ++s) {
      const double dv = r.samples[static_cast<std::size_t>(s) * r.predicted.size() + k] - mean;
      var += dv * dv;
    }
    r.predicted[k] = static_cast<float>(mean);
    r.dispersion[k] = static_cast<float>(std::sqrt(var / s_count));
  }
  if (noise.dropout == 0.0 && noise.sigma == 0.0 && s_count > 1) {
    r.warnings.push_back("dropout and sigma are both zero; all " + std::to_string(s_count) +
                         " samples are identical");
  }
  return r;
}

std::vector<Histogram> marginal_histograms(const RolloutResult& result, int step, int bins) {
  if (result.mode != RolloutMode::stochastic || result.sample_count() < 30) {
    throw ParameterError("histograms need a stochastic result with at least 30 samples");
  }
  if (step < 0 || step >= result.horizon) {
    throw IndexError("step " + std::to_string(step) + " outside horizon " + std::to_string(result.horizon));
  }
  if (bins < 1) throw ParameterError("histograms need at least one bin");
  const int s_count = result.sample_count();
  std::vector<Histogram> out;
  for (int i = 0; i < result.agents; ++i) {
    for (int axis = 0; axis < 2; ++axis) {
      std::vector<double> v(static_cast<std::size_t>(s_count));
      for (int s = 0; s < s_count; ++s) v[static_cast<std::size_t>(s)] = result.sample(s, step, i, axis);
      auto [mn, mx] = std::minmax_element(v.begin(), v.end());
      double lo = *mn, hi = *mx;
      if (hi <= lo) {
        lo -= 0.5;
        hi += 0.5;
      }
      Histogram h;
      h.agent = i;
      h.axis = axis == 0 ? 'x' : 'y';
      h.edges.resize(static_cast<std::size_t>(bins) + 1);
      for (int b = 0; b <= bins; ++b) h.edges[static_cast<std::size_t>(b)] = lo + (hi - lo) * b / bins;
      std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
      for (double x : v) {
        auto b = static_cast<std::ptrdiff_t>((x - lo) / (hi - lo) * bins);
        b = std::clamp<std::ptrdiff_t>(b, 0, bins - 1);
        ++counts[static_cast<std::size_t>(b)];
      }
      h.masses.resize(counts.size());
      for (std::size_t b = 0; b < counts.size(); ++b) {
        h.masses[b] = static_cast<double>(counts[b]) / s_count;
      }
      out.push_back(std::move(h));
    }
  }
  return out;
}

double bimodality_coefficient(std::span<const double> values) {
  const auto n = static_cast<double>(values.size());
  if (values.size() < 4) throw ParameterError("bimodality coefficient needs at least 4 values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (!(m2 > 0.0)) return 0.0;
  // Bias-corrected sample skewness and excess kurtosis.
  const double g1 = m3 / std::pow(m2, 1.5);
  const double g2 = m4 / (m2 * m2) - 3.0;
  const double skew = g1 * std::sqrt(n * (n - 1)) / (n - 2);
  const double kurt = ((n + 1) * g2 + 6) * (n - 1) / ((n - 2) * (n - 3));
  return (skew * skew + 1) / (kurt + 3 * (n - 1) * (n - 1) / ((n - 2) * (n - 3)));
}

CloneResult clone_swarm(const StepPredictor& model, std::span<const gen::AgentState> initial,
                        std::span<const float> context, int steps, const PlantConfig& plant,
                        const CloneObserver& observer) {
  if (steps < 1) throw ParameterError("clone_swarm: steps must be >= 1");
  if (model.state_dim() != gen::kStateDim) {
    throw ConfigError("clone_swarm needs a model over (px, py, vx, vy) states");
  }
  diff::NoTapeScope no_tape;
  const int n = static_cast<int>(initial.size());
  const int tw = model.window_length();
  const std::size_t frame = static_cast<std::size_t>(n) * gen::kStateDim;
  const double bound = 5.0 * plant.arena_half_width;

  CloneResult out;
  auto& ep = out.executed;
  ep.steps = steps + 1;
  ep.agents = n;
  ep.context.assign(context.begin(), context.end());
  ep.states.reserve(static_cast<std::size_t>(steps + 1) * frame);
  for (const auto& a : initial) {
    ep.states.insert(ep.states.end(), {static_cast<float>(a.position.x), static_cast<float>(a.position.y),
                                       static_cast<float>(a.velocity.x), static_cast<float>(a.velocity.y)});
  }

  std::vector<float> history;
  for (int k = 0; k < tw; ++k) history.insert(history.end(), ep.states.begin(), ep.states.end());
  Tensor window = seed_windows(model, history, n, context, 1);

  std::vector<gen::AgentState> state(initial.begin(), initial.end());
  for (int t = 0; t < steps; ++t) {
    if (observer) {
      observer(t, window, std::span<const float>(ep.states).subspan(static_cast<std::size_t>(t) * frame, frame));
    }
    const Tensor next = model.predict_next(window, nullptr);
    const auto v = next.values();
    std::vector<float> realized(frame);
    for (int i = 0; i < n; ++i) {
      gen::Vec2 cmd{v[static_cast<std::size_t>(i) * 4 + 2], v[static_cast<std::size_t>(i) * 4 + 3]};
      const double speed = cmd.norm();
      if (speed > plant.max_speed) cmd *= plant.max_speed / speed;
      auto& a = state[static_cast<std::size_t>(i)];
      a.velocity = cmd;
      a.position += cmd * plant.dt;
      if (!std::isfinite(a.position.x) || !std::isfinite(a.position.y) || std::abs(a.position.x) > bound ||
          std::abs(a.position.y) > bound) {
        throw RolloutDivergedError(t + 1);
      }
      float* r = realized.data() + static_cast<std::size_t>(i) * 4;
      r[0] = static_cast<float>(a.position.x);
      r[1] = static_cast<float>(a.position.y);
      r[2] = static_cast<float>(a.velocity.x);
      r[3] = static_cast<float>(a.velocity.y);
    }
    ep.states.insert(ep.states.end(), realized.begin(), realized.end());
    window = model::shift_window(window, Tensor({1, static_cast<std::size_t>(n), 4}, std::move(realized)));
  }
  return out;
}

std::string rollout_csv(const RolloutResult& r) {
  using detail::num;
  std::ostringstream out;
  out << "sample,step,agent,px,py,vx,vy\n";
  const bool stochastic = r.mode == RolloutMode::stochastic;
  const int s_count = stochastic ? r.sample_count() : 1;
  for (int s = 0; s < s_count; ++s) {
    for (int t = 0; t < r.horizon; ++t) {
      for (int i = 0; i < r.agents; ++i) {
        out << s << ',' << t + 1 << ',' << i;
        for (int c = 0; c < r.state_dim; ++c) out << ',' << num(stochastic ? r.sample(s, t, i, c) : r.at(t, i, c));
        out << '\n';
      }
    }
  }
  return out.str();
}

std::string histogram_csv(std::span<const Histogram> histograms) {
  using detail::num;
  std::ostringstream out;
  out << "agent,axis,bin_lo,bin_hi,mass\n";
  for (const auto& h : histograms) {
    for (std::size_t b = 0; b < h.masses.size(); ++b) {
      out << h.agent << ',' << h.axis << ',' << num(h.edges[b]) << ',' << num(h.edges[b + 1]) << ','
          << num(h.masses[b]) << '\n';
    }
  }
  return out.str();
}

std::string trajectory_csv(const gen::Episode& ep) {
  using detail::num;
  std::ostringstream out;
  out << "sample,step,agent,px,py,vx,vy\n";
  for (int t = 0; t < ep.steps; ++t) {
    for (int i = 0; i < ep.agents; ++i) {
      out << 0 << ',' << t << ',' << i;
      for (int c = 0; c < ep.state_dim; ++c) out << ',' << num(ep.at(t, i, c));
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace swarmnet::rollout
