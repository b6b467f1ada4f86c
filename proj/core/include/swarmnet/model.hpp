#pragma once

// SwarmNet: a temporal Conv1D encoder per agent, graph convolution over the
// complete directed agent graph, and an MLP decoder to next states.
//
// Batched layout used throughout: windows are [B, N, T_w, D + d_c] (batch of
// graphs, agents, time, channels); node states are [B*N, H] with rows ordered
// (graph, agent); edge states are [B*N*(N-1), d_e] with rows ordered
// (graph, source agent, target agent), skipping self-pairs.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "swarmnet/tensor.hpp"

namespace swarmnet::model {

using diff::Rng;
using diff::Shape;
using diff::Tensor;

enum class TemporalEncoder { conv1d, markov };

struct SwarmNetConfig {
  int conv_layers = 3;    // L
  int kernel_size = 3;    // K
  int conv_filters = 32;  // C, width of all but the last conv layer
  int encoded_size = 32;  // H, width of the last conv layer
  std::vector<int> mlp_hidden{64, 64};
  int edge_size = 64;  // d_e
  int gc_layers = 1;
  double dropout = 0.0;
  TemporalEncoder temporal_encoder = TemporalEncoder::conv1d;
  bool use_context = true;
  bool predict_delta = true;
  bool zero_init_output = true;
  int state_dim = 4;
  int context_dim = 5;

  /// L(K-1)+1 for the conv encoder, 1 for the Markov encoder.
  int window_length() const;
  int input_channels() const { return state_dim + context_dim; }
  void validate() const;
  friend bool operator==(const SwarmNetConfig&, const SwarmNetConfig&) = default;
};

struct Linear {
  Tensor weight;  // [in, out]
  Tensor bias;    // [out]
};

struct Mlp {
  std::vector<Linear> layers;
};

struct ConvLayer {
  Tensor kernel;  // [K, Cin, Cout]
  Tensor bias;    // [Cout]
};

struct GraphConvParams {
  Mlp edge;       // phi^e over concat(v_source, v_target)
  Mlp aggregate;  // psi^{e-bar} over the summed incoming edges
  Mlp node;       // phi^v over concat(v_i, e-bar_i)
};

struct SwarmNetParams {
  std::vector<ConvLayer> conv;
  Mlp markov;
  std::vector<GraphConvParams> graph;
  Mlp decoder;

  /// Handles share storage with the model.
  std::vector<std::pair<std::string, Tensor>> named() const;
  std::vector<Tensor> list() const;
};

/// Maps a batch of state windows to next states.
class StepPredictor {
 public:
  virtual ~StepPredictor() = default;
  virtual int window_length() const = 0;
  virtual int state_dim() const = 0;
  virtual int context_dim() const = 0;
  /// windows [B, N, T_w, D + d_c] -> [B, N, D]. A null rng means no dropout.
  virtual Tensor predict_next(const Tensor& windows, Rng* dropout_rng) const = 0;
};

/// Predicts that nothing changes: the next state equals the last observed one.
class CopyLastState final : public StepPredictor {
 public:
  CopyLastState(int window_length, int state_dim, int context_dim)
      : window_(window_length), state_dim_(state_dim), context_dim_(context_dim) {}
  int window_length() const override { return window_; }
  int state_dim() const override { return state_dim_; }
  int context_dim() const override { return context_dim_; }
  Tensor predict_next(const Tensor& windows, Rng* dropout_rng) const override;

 private:
  int window_;
  int state_dim_;
  int context_dim_;
};

struct EdgeIndex {
  std::vector<std::uint32_t> source;
  std::vector<std::uint32_t> target;
};

/// All ordered pairs (i, j), i != j, for each of `graphs` disjoint N-node graphs.
EdgeIndex complete_digraph(std::size_t graphs, std::size_t agents);

Tensor mlp_forward(const Mlp& mlp, Tensor x, double dropout, Rng* rng);

class SwarmNet final : public StepPredictor {
 public:
  SwarmNet(SwarmNetConfig cfg, std::uint64_t seed);
  /// Throws DimensionError if a tensor does not match the configuration.
  SwarmNet(SwarmNetConfig cfg, SwarmNetParams params);

  static SwarmNetParams init_params(const SwarmNetConfig& cfg, std::uint64_t seed);

  const SwarmNetConfig& config() const { return cfg_; }
  const SwarmNetParams& params() const { return params_; }
  SwarmNetParams& params() { return params_; }
  std::vector<Tensor> parameters() const { return params_.list(); }
  /// Deep copy with independent parameter storage.
  SwarmNet clone() const;
  /// Same parameters (shared storage) with a different dropout probability.
  SwarmNet with_dropout(double p) const;

  int window_length() const override { return cfg_.window_length(); }
  int state_dim() const override { return cfg_.state_dim; }
  int context_dim() const override { return cfg_.context_dim; }

  /// windows [B, N, T_w, C] -> node states [B*N, H].
  Tensor encode_temporal(const Tensor& windows) const;
  /// nodes [B*N, H] -> edges [B*N*(N-1), d_e]; zero rows when N == 1.
  Tensor edge_update(const Tensor& nodes, std::size_t agents, const GraphConvParams& gc,
                     Rng* dropout_rng) const;
  /// edges -> [B*N, d_e]: psi applied to the sum of edges targeting each node.
  Tensor aggregate_edges(const Tensor& edges, std::size_t graphs, std::size_t agents,
                         const GraphConvParams& gc) const;
  /// (nodes [B*N, H], aggregated [B*N, d_e]) -> [B*N, H].
  Tensor node_update(const Tensor& nodes, const Tensor& aggregated, const GraphConvParams& gc,
                     Rng* dropout_rng) const;
  Tensor decode(const Tensor& nodes, Rng* dropout_rng) const;

  Tensor predict_next(const Tensor& windows, Rng* dropout_rng) const override;

  /// series [T, N, D] with a static context -> predictions [T - T_w + 1, N, D],
  /// one per window position.
  Tensor forward(const Tensor& series, std::span<const float> context, Rng* dropout_rng) const;

  /// Throws PoisonedModelError on any non-finite parameter.
  void check_finite() const;

 private:
  SwarmNetConfig cfg_;
  SwarmNetParams params_;
};

/// Windows [count, N, T_w, D + d_c] starting at time `first` of a time-major
/// [T, N, D] state series, with the static context appended to every step.
Tensor make_windows(std::span<const float> states, int steps, int agents, int state_dim,
                    std::span<const float> context, int window_length, int first, int count);

/// Drops the oldest step of each window and appends `next` [B, N, D] with the
/// window's own context channels.
Tensor shift_window(const Tensor& windows, const Tensor& next);

}  // namespace swarmnet::model
