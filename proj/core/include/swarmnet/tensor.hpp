#pragma once

// Dense f32 tensors with define-by-run reverse-mode differentiation.
//
// A Tensor is a shared handle to a Node. Leaf parameters carry a gradient
// buffer from construction. Operations record themselves on the thread's
// active Tape when any operand requires a gradient; with no active tape they
// run forward-only and produce untracked results.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace swarmnet::diff {

using Shape = std::vector<std::size_t>;
using Rng = std::mt19937_64;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

struct Node {
  Shape shape;
  std::vector<float> value;
  std::vector<float> grad;  // empty until a backward pass reaches the node
  bool requires_grad = false;

  /// Allocates a zeroed gradient buffer on first use.
  std::span<float> ensure_grad();
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f);
  Tensor(Shape shape, std::vector<float> values);

  /// Leaf tensor that accumulates gradients.
  static Tensor parameter(Shape shape, std::vector<float> values);
  static Tensor scalar(float value);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }
  std::size_t numel() const { return node_->value.size(); }

  std::span<const float> values() const { return node_->value; }
  std::span<float> mutable_values() { return node_->value; }
  float item() const;

  bool requires_grad() const { return node_->requires_grad; }
  /// Empty span when no gradient has been accumulated.
  std::span<const float> grad() const { return node_->grad; }
  std::span<float> mutable_grad() { return node_->ensure_grad(); }
  void zero_grad();

  /// Untracked copy of the values.
  Tensor detach() const;

  const std::shared_ptr<Node>& node() const { return node_; }
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<Node> node_;
};

/// Ordered record of tracked operations. Entries are appended as operations
/// execute, so parents always precede their children.
class Tape {
 public:
  struct Entry {
    const char* op;
    std::vector<std::shared_ptr<Node>> parents;
    std::shared_ptr<Node> output;
    std::function<void()> backward;
  };

  void record(Entry entry);

  /// Reverse-topological gradient accumulation from a scalar loss.
  /// Intermediate gradients are reset first; leaf gradients accumulate, so two
  /// calls without zeroing double every parameter gradient.
  void backward(const Tensor& loss);

  void clear() { entries_.clear(); }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }

  /// Tape installed on the calling thread, or nullptr.
  static Tape* active();

 private:
  friend class TapeScope;
  std::vector<Entry> entries_;
};

/// Installs a tape as the thread's active tape for the scope's lifetime.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* previous_;
};

/// Suspends recording (e.g. for finite-difference probes inside a tracked scope).
class NoTapeScope {
 public:
  NoTapeScope();
  ~NoTapeScope();
  NoTapeScope(const NoTapeScope&) = delete;
  NoTapeScope& operator=(const NoTapeScope&) = delete;

 private:
  Tape* previous_;
};

/// Glorot/Xavier uniform initialization in +-sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace swarmnet::diff
