#include "swarmnet/model.hpp"

#include <cmath>

#include "swarmnet/errors.hpp"
#include "swarmnet/ops.hpp"

namespace swarmnet::model {

namespace {

Linear make_linear(std::size_t in, std::size_t out, Rng& rng) {
  Linear l;
  l.weight = diff::glorot_uniform({in, out}, in, out, rng);
  l.bias = Tensor::parameter({out}, std::vector<float>(out, 0.0f));
  return l;
}

Mlp make_mlp(std::size_t in, const std::vector<int>& hidden, std::size_t out, Rng& rng) {
  Mlp mlp;
  std::size_t width = in;
  for (int h : hidden) {
    mlp.layers.push_back(make_linear(width, static_cast<std::size_t>(h), rng));
    width = static_cast<std::size_t>(h);
  }
  mlp.layers.push_back(make_linear(width, out, rng));
  return mlp;
}

void name_mlp(const Mlp& mlp, const std::string& prefix,
              std::vector<std::pair<std::string, Tensor>>& out) {
  for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
    out.emplace_back(prefix + "." + std::to_string(l) + ".weight", mlp.layers[l].weight);
    out.emplace_back(prefix + "." + std::to_string(l) + ".bias", mlp.layers[l].bias);
  }
}

Tensor deep_copy(const Tensor& t) {
  return Tensor::parameter(t.shape(), std::vector<float>(t.values().begin(), t.values().end()));
}

Mlp copy_mlp(const Mlp& mlp) {
  Mlp out;
  for (const auto& l : mlp.layers) out.layers.push_back({deep_copy(l.weight), deep_copy(l.bias)});
  return out;
}

void check_windows(const Tensor& windows, int window_length, int channels) {
  if (windows.rank() != 4 || static_cast<int>(windows.dim(2)) != window_length ||
      static_cast<int>(windows.dim(3)) != channels) {
    throw DimensionError("expected windows [B, N, " + std::to_string(window_length) + ", " +
                         std::to_string(channels) + "], got " + diff::to_string(windows.shape()));
  }
}

}  // namespace

int SwarmNetConfig::window_length() const {
  if (temporal_encoder == TemporalEncoder::markov) return 1;
  return conv_layers * (kernel_size - 1) + 1;
}

void SwarmNetConfig::validate() const {
  if (conv_layers < 1 || kernel_size < 1 || conv_filters < 1 || encoded_size < 1) {
    throw ConfigError("model: conv_layers, kernel_size, conv_filters and encoded_size must be >= 1");
  }
  for (int h : mlp_hidden)
    if (h < 1) throw ConfigError("model: hidden widths must be >= 1");
  if (edge_size < 1 || gc_layers < 1) throw ConfigError("model: edge_size and gc_layers must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("model: dropout must lie in [0, 1)");
  if (state_dim < 1 || context_dim < 0) throw ConfigError("model: invalid state/context dimension");
}

std::vector<std::pair<std::string, Tensor>> SwarmNetParams::named() const {
  std::vector<std::pair<std::string, Tensor>> out;
  for (std::size_t l = 0; l < conv.size(); ++l) {
    out.emplace_back("conv." + std::to_string(l) + ".kernel", conv[l].kernel);
    out.emplace_back("conv." + std::to_string(l) + ".bias", conv[l].bias);
  }
  name_mlp(markov, "markov", out);
  for (std::size_t g = 0; g < graph.size(); ++g) {
    const std::string prefix = "gc." + std::to_string(g);
    name_mlp(graph[g].edge, prefix + ".edge", out);
    name_mlp(graph[g].aggregate, prefix + ".aggregate", out);
    name_mlp(graph[g].node, prefix + ".node", out);
  }
  name_mlp(decoder, "decoder", out);
  return out;
}

std::vector<Tensor> SwarmNetParams::list() const {
  std::vector<Tensor> out;
  for (auto& [name, t] : named()) out.push_back(t);
  return out;
}

Tensor CopyLastState::predict_next(const Tensor& windows, Rng*) const {
  check_windows(windows, window_, state_dim_ + context_dim_);
  const auto b = windows.dim(0), n = windows.dim(1);
  Tensor last = diff::slice(windows, 2, windows.dim(2) - 1, 1);
  return diff::reshape(diff::slice(last, 3, 0, static_cast<std::size_t>(state_dim_)),
                       {b, n, static_cast<std::size_t>(state_dim_)});
}

EdgeIndex complete_digraph(std::size_t graphs, std::size_t agents) {
  EdgeIndex idx;
  idx.source.reserve(graphs * agents * (agents ? agents - 1 : 0));
  idx.target.reserve(idx.source.capacity());
  for (std::size_t g = 0; g < graphs; ++g) {
    const auto base = static_cast<std::uint32_t>(g * agents);
    for (std::uint32_t i = 0; i < agents; ++i) {
      for (std::uint32_t j = 0; j < agents; ++j) {
        if (i == j) continue;
        idx.source.push_back(base + i);
        idx.target.push_back(base + j);
      }
    }
  }
  return idx;
}

Tensor mlp_forward(const Mlp& mlp, Tensor x, double dropout, Rng* rng) {
  for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
    x = diff::linear(x, mlp.layers[l].weight, mlp.layers[l].bias);
    if (l + 1 == mlp.layers.size()) break;
    x = diff::relu(x);
    if (rng != nullptr && dropout > 0.0) x = diff::mul(x, diff::dropout_mask(x.shape(), dropout, *rng));
  }
  return x;
}

SwarmNet::SwarmNet(SwarmNetConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)), params_(init_params(cfg_, seed)) {}

SwarmNet::SwarmNet(SwarmNetConfig cfg, SwarmNetParams params)
    : cfg_(std::move(cfg)), params_(std::move(params)) {
  cfg_.validate();
  const auto expected = init_params(cfg_, 0).named();
  const auto actual = params_.named();
  if (expected.size() != actual.size()) {
    throw DimensionError("model expects " + std::to_string(expected.size()) + " tensors, got " +
                         std::to_string(actual.size()));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (expected[i].second.shape() != actual[i].second.shape()) {
      throw DimensionError("tensor '" + expected[i].first + "' expected shape " +
                           diff::to_string(expected[i].second.shape()) + ", got " +
                           diff::to_string(actual[i].second.shape()));
    }
  }
}

SwarmNetParams SwarmNet::init_params(const SwarmNetConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  SwarmNetParams p;
  const auto channels = static_cast<std::size_t>(cfg.input_channels());
  const auto hidden_h = static_cast<std::size_t>(cfg.encoded_size);
  const auto d_e = static_cast<std::size_t>(cfg.edge_size);
  if (cfg.temporal_encoder == TemporalEncoder::conv1d) {
    std::size_t cin = channels;
    const auto k = static_cast<std::size_t>(cfg.kernel_size);
    for (int l = 0; l < cfg.conv_layers; ++l) {
      const std::size_t cout = l + 1 == cfg.conv_layers ? hidden_h : static_cast<std::size_t>(cfg.conv_filters);
      ConvLayer layer;
      layer.kernel = diff::glorot_uniform({k, cin, cout}, k * cin, k * cout, rng);
      layer.bias = Tensor::parameter({cout}, std::vector<float>(cout, 0.0f));
      p.conv.push_back(std::move(layer));
      cin = cout;
    }
  } else {
    p.markov = make_mlp(channels, cfg.mlp_hidden, hidden_h, rng);
  }
  for (int g = 0; g < cfg.gc_layers; ++g) {
    GraphConvParams gc;
    gc.edge = make_mlp(2 * hidden_h, cfg.mlp_hidden, d_e, rng);
    gc.aggregate = make_mlp(d_e, cfg.mlp_hidden, d_e, rng);
    gc.node = make_mlp(hidden_h + d_e, cfg.mlp_hidden, hidden_h, rng);
    p.graph.push_back(std::move(gc));
  }
  p.decoder = make_mlp(hidden_h, cfg.mlp_hidden, static_cast<std::size_t>(cfg.state_dim), rng);
  if (cfg.zero_init_output) {
    for (auto& v : p.decoder.layers.back().weight.mutable_values()) v = 0.0f;
  }
  return p;
}

SwarmNet SwarmNet::clone() const {
  SwarmNetParams p;
  for (const auto& c : params_.conv) p.conv.push_back({deep_copy(c.kernel), deep_copy(c.bias)});
  p.markov = copy_mlp(params_.markov);
  for (const auto& g : params_.graph) p.graph.push_back({copy_mlp(g.edge), copy_mlp(g.aggregate), copy_mlp(g.node)});
  p.decoder = copy_mlp(params_.decoder);
  return SwarmNet(cfg_, std::move(p));
}

SwarmNet SwarmNet::with_dropout(double p) const {
  SwarmNetConfig cfg = cfg_;
  cfg.dropout = p;
  return SwarmNet(std::move(cfg), params_);
}

Tensor SwarmNet::encode_temporal(const Tensor& windows) const {
  check_windows(windows, cfg_.window_length(), cfg_.input_channels());
  const std::size_t rows = windows.dim(0) * windows.dim(1);
  const std::size_t steps = windows.dim(2);
  const std::size_t channels = windows.dim(3);
  if (cfg_.temporal_encoder == TemporalEncoder::markov) {
    Tensor last = diff::reshape(diff::slice(windows, 2, steps - 1, 1), {rows, channels});
    return mlp_forward(params_.markov, last, 0.0, nullptr);
  }
  Tensor x = diff::reshape(windows, {rows, steps, channels});
  for (std::size_t l = 0; l < params_.conv.size(); ++l) {
    x = diff::conv1d_valid(x, params_.conv[l].kernel, params_.conv[l].bias);
    if (l + 1 < params_.conv.size()) x = diff::relu(x);
  }
  return diff::reshape(x, {rows, static_cast<std::size_t>(cfg_.encoded_size)});
}

Tensor SwarmNet::edge_update(const Tensor& nodes, std::size_t agents, const GraphConvParams& gc,
                             Rng* dropout_rng) const {
  if (agents < 1 || nodes.rank() != 2 || nodes.dim(0) % agents != 0) {
    throw DimensionError("edge_update: node states " + diff::to_string(nodes.shape()) + " for " +
                         std::to_string(agents) + " agents");
  }
  const auto d_e = static_cast<std::size_t>(cfg_.edge_size);
  if (agents == 1) return Tensor(Shape{0, d_e});
  const EdgeIndex idx = complete_digraph(nodes.dim(0) / agents, agents);
  Tensor pairs = diff::concat_last(diff::gather_rows(nodes, idx.source), diff::gather_rows(nodes, idx.target));
  return mlp_forward(gc.edge, pairs, cfg_.dropout, dropout_rng);
}

Tensor SwarmNet::aggregate_edges(const Tensor& edges, std::size_t graphs, std::size_t agents,
                                 const GraphConvParams& gc) const {
  const auto d_e = static_cast<std::size_t>(cfg_.edge_size);
  const std::size_t nodes = graphs * agents;
  if (edges.rank() != 2 || edges.dim(1) != d_e || edges.dim(0) != nodes * (agents - 1)) {
    throw DimensionError("aggregate_edges: edge states " + diff::to_string(edges.shape()) +
                         " for " + std::to_string(graphs) + " graphs of " + std::to_string(agents) +
                         " agents");
  }
  Tensor incoming = agents == 1
                        ? Tensor(Shape{nodes, d_e})
                        : diff::segment_sum(edges, complete_digraph(graphs, agents).target, nodes);
  return mlp_forward(gc.aggregate, incoming, 0.0, nullptr);
}

Tensor SwarmNet::node_update(const Tensor& nodes, const Tensor& aggregated, const GraphConvParams& gc,
                             Rng* dropout_rng) const {
  if (nodes.rank() != 2 || aggregated.rank() != 2 || nodes.dim(0) != aggregated.dim(0)) {
    throw DimensionError("node_update: node states " + diff::to_string(nodes.shape()) +
                         " with aggregated edges " + diff::to_string(aggregated.shape()));
  }
  return mlp_forward(gc.node, diff::concat_last(nodes, aggregated), cfg_.dropout, dropout_rng);
}

Tensor SwarmNet::decode(const Tensor& nodes, Rng* dropout_rng) const {
  return mlp_forward(params_.decoder, nodes, cfg_.dropout, dropout_rng);
}

Tensor SwarmNet::predict_next(const Tensor& windows, Rng* dropout_rng) const {
  check_windows(windows, cfg_.window_length(), cfg_.input_channels());
  const std::size_t graphs = windows.dim(0);
  const std::size_t agents = windows.dim(1);
  const auto d = static_cast<std::size_t>(cfg_.state_dim);
  Tensor input = windows;
  if (!cfg_.use_context && cfg_.context_dim > 0) {
    std::vector<float> keep(static_cast<std::size_t>(cfg_.input_channels()), 0.0f);
    std::fill_n(keep.begin(), d, 1.0f);
    const Shape mask_shape{keep.size()};
    input = diff::mul(windows, Tensor(mask_shape, std::move(keep)));
  }
  Tensor v = encode_temporal(input);
  for (const auto& gc : params_.graph) {
    Tensor e = edge_update(v, agents, gc, dropout_rng);
    Tensor agg = aggregate_edges(e, graphs, agents, gc);
    v = node_update(v, agg, gc, dropout_rng);
  }
  Tensor out = decode(v, dropout_rng);
  if (cfg_.predict_delta) {
    Tensor last = diff::slice(diff::slice(windows, 2, windows.dim(2) - 1, 1), 3, 0, d);
    out = diff::add(out, diff::reshape(last, {graphs * agents, d}));
  }
  return diff::reshape(out, {graphs, agents, d});
}

Tensor SwarmNet::forward(const Tensor& series, std::span<const float> context, Rng* dropout_rng) const {
  if (series.rank() != 3 || static_cast<int>(series.dim(2)) != cfg_.state_dim) {
    throw DimensionError("forward: expected series [T, N, " + std::to_string(cfg_.state_dim) +
                         "], got " + diff::to_string(series.shape()));
  }
  if (static_cast<int>(context.size()) != cfg_.context_dim) {
    throw DimensionError("forward: context length " + std::to_string(context.size()) +
                         " but model expects " + std::to_string(cfg_.context_dim));
  }
  check_finite();
  const int steps = static_cast<int>(series.dim(0));
  const int tw = cfg_.window_length();
  if (steps < tw) {
    throw SeriesTooShortError("forward: series of length " + std::to_string(steps) +
                              " is shorter than the window length " + std::to_string(tw));
  }
  const int starts = steps - tw + 1;
  Tensor windows = make_windows(series.values(), steps, static_cast<int>(series.dim(1)), cfg_.state_dim,
                                context, tw, 0, starts);
  return predict_next(windows, dropout_rng);
}

void SwarmNet::check_finite() const {
  for (const auto& [name, t] : params_.named())
    for (float v : t.values())
      if (!std::isfinite(v)) throw PoisonedModelError(name);
}

Tensor make_windows(std::span<const float> states, int steps, int agents, int state_dim,
                    std::span<const float> context, int window_length, int first, int count) {
  if (count < 1 || first < 0 || first + count - 1 + window_length > steps) {
    throw SeriesTooShortError("cannot cut " + std::to_string(count) + " windows of length " +
                              std::to_string(window_length) + " from step " + std::to_string(first) +
                              " of a " + std::to_string(steps) + "-step series");
  }
  const std::size_t d = static_cast<std::size_t>(state_dim);
  const std::size_t c = d + context.size();
  const std::size_t n = static_cast<std::size_t>(agents);
  const std::size_t tw = static_cast<std::size_t>(window_length);
  std::vector<float> out(static_cast<std::size_t>(count) * n * tw * c);
  float* dst = out.data();
  for (int k = 0; k < count; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t tau = 0; tau < tw; ++tau) {
        const std::size_t t = static_cast<std::size_t>(first + k) + tau;
        const float* src = states.data() + (t * n + i) * d;
        dst = std::copy_n(src, d, dst);
        dst = std::copy(context.begin(), context.end(), dst);
      }
    }
  }
  return Tensor({static_cast<std::size_t>(count), n, tw, c}, std::move(out));
}

Tensor shift_window(const Tensor& windows, const Tensor& next) {
  if (windows.rank() != 4 || next.rank() != 3 || next.dim(0) != windows.dim(0) ||
      next.dim(1) != windows.dim(1) || next.dim(2) > windows.dim(3)) {
    throw DimensionError("shift_window: windows " + diff::to_string(windows.shape()) + " with next " +
                         diff::to_string(next.shape()));
  }
  const std::size_t b = windows.dim(0), n = windows.dim(1), tw = windows.dim(2), c = windows.dim(3);
  const std::size_t d = next.dim(2);
  Tensor row = diff::reshape(next, {b, n, 1, d});
  if (c > d) {
    Tensor ctx = diff::slice(diff::slice(windows, 2, tw - 1, 1), 3, d, c - d);
    row = diff::concat(row, ctx, 3);
  }
  if (tw == 1) return row;
  return diff::concat(diff::slice(windows, 2, 1, tw - 1), row, 2);
}

}  // namespace swarmnet::model
