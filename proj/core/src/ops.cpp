#include "swarmnet/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <memory>

#include "swarmnet/errors.hpp"

namespace swarmnet::diff {

namespace {

using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;
using ConstStridedMap = Eigen::Map<const RowMat, 0, Eigen::OuterStride<>>;
using MutStridedMap = Eigen::Map<RowMat, 0, Eigen::OuterStride<>>;

using NodePtr = std::shared_ptr<Node>;

bool tracked(std::initializer_list<const Tensor*> operands) {
  if (Tape::active() == nullptr) return false;
  return std::any_of(operands.begin(), operands.end(),
                     [](const Tensor* t) { return t->requires_grad(); });
}

Tensor make_output(Shape shape, std::vector<float> values, bool track) {
  Tensor out(std::move(shape), std::move(values));
  out.node()->requires_grad = track;
  return out;
}

void record(const char* op, std::vector<NodePtr> parents, const Tensor& out,
            std::function<void()> backward) {
  Tape::active()->record({op, std::move(parents), out.node(), std::move(backward)});
}

void require_defined(const Tensor& t, const char* op) {
  if (!t.defined()) throw DimensionError(std::string(op) + ": undefined operand");
}

std::string pair_str(const Tensor& a, const Tensor& b) {
  return to_string(a.shape()) + " and " + to_string(b.shape());
}

bool is_suffix(const Shape& small, const Shape& big) {
  if (small.size() > big.size()) return false;
  return std::equal(small.rbegin(), small.rend(), big.rbegin());
}

// Adds a double accumulator into a float gradient buffer.
void flush(std::span<float> grad, const std::vector<double>& acc) {
  for (std::size_t i = 0; i < acc.size(); ++i) grad[i] += static_cast<float>(acc[i]);
}

enum class BinaryKind { add, sub, mul };

Tensor binary(const Tensor& a, const Tensor& b, BinaryKind kind, const char* name) {
  require_defined(a, name);
  require_defined(b, name);
  Shape out_shape;
  if (a.shape() == b.shape() || is_suffix(b.shape(), a.shape())) {
    out_shape = a.shape();
  } else if (is_suffix(a.shape(), b.shape())) {
    out_shape = b.shape();
  } else {
    throw DimensionError(std::string(name) + ": incompatible shapes " + pair_str(a, b));
  }
  const std::size_t n = numel(out_shape);
  const std::size_t na = a.numel();
  const std::size_t nb = b.numel();
  auto av = a.values();
  auto bv = b.values();
  std::vector<float> out(n);
  switch (kind) {
    case BinaryKind::add:
      for (std::size_t i = 0; i < n; ++i) out[i] = av[i % na] + bv[i % nb];
      break;
    case BinaryKind::sub:
      for (std::size_t i = 0; i < n; ++i) out[i] = av[i % na] - bv[i % nb];
      break;
    case BinaryKind::mul:
      for (std::size_t i = 0; i < n; ++i) out[i] = av[i % na] * bv[i % nb];
      break;
  }
  const bool track = tracked({&a, &b});
  Tensor result = make_output(std::move(out_shape), std::move(out), track);
  if (track) {
    NodePtr an = a.node(), bn = b.node(), on = result.node();
    record(name, {an, bn}, result, [an, bn, on, kind, n, na, nb] {
      const auto& g = on->grad;
      auto accumulate = [&](const NodePtr& target, std::size_t nt, auto&& factor) {
        if (!target->requires_grad) return;
        auto tg = target->ensure_grad();
        if (nt == n) {
          for (std::size_t i = 0; i < n; ++i) tg[i] += g[i] * factor(i);
        } else {
          std::vector<double> acc(nt, 0.0);
          for (std::size_t i = 0; i < n; ++i) acc[i % nt] += static_cast<double>(g[i] * factor(i));
          flush(tg, acc);
        }
      };
      switch (kind) {
        case BinaryKind::add:
          accumulate(an, na, [](std::size_t) { return 1.0f; });
          accumulate(bn, nb, [](std::size_t) { return 1.0f; });
          break;
        case BinaryKind::sub:
          accumulate(an, na, [](std::size_t) { return 1.0f; });
          accumulate(bn, nb, [](std::size_t) { return -1.0f; });
          break;
        case BinaryKind::mul: {
          const auto& av = an->value;
          const auto& bv = bn->value;
          accumulate(an, na, [&](std::size_t i) { return bv[i % nb]; });
          accumulate(bn, nb, [&](std::size_t i) { return av[i % na]; });
          break;
        }
      }
    });
  }
  return result;
}

std::size_t product(const Shape& s, std::size_t from, std::size_t to) {
  std::size_t p = 1;
  for (std::size_t i = from; i < to; ++i) p *= s[i];
  return p;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_defined(a, "matmul");
  require_defined(b, "matmul");
  if (a.rank() < 2 || b.rank() != 2 || a.shape().back() != b.dim(0)) {
    throw DimensionError("matmul: cannot multiply " + pair_str(a, b));
  }
  const auto k = static_cast<Eigen::Index>(b.dim(0));
  const auto n = static_cast<Eigen::Index>(b.dim(1));
  const auto m = static_cast<Eigen::Index>(a.numel() / b.dim(0));
  Shape out_shape(a.shape().begin(), a.shape().end() - 1);
  out_shape.push_back(b.dim(1));
  std::vector<float> out(static_cast<std::size_t>(m * n));
  MutMap(out.data(), m, n).noalias() = ConstMap(a.values().data(), m, k) *
                                      ConstMap(b.values().data(), k, n);
  const bool track = tracked({&a, &b});
  Tensor result = make_output(std::move(out_shape), std::move(out), track);
  if (track) {
    NodePtr an = a.node(), bn = b.node(), on = result.node();
    record("matmul", {an, bn}, result, [an, bn, on, m, k, n] {
      ConstMap g(on->grad.data(), m, n);
      if (an->requires_grad) {
        MutMap(an->ensure_grad().data(), m, k).noalias() +=
            g * ConstMap(bn->value.data(), k, n).transpose();
      }
      if (bn->requires_grad) {
        MutMap(bn->ensure_grad().data(), k, n).noalias() +=
            ConstMap(an->value.data(), m, k).transpose() * g;
      }
    });
  }
  return result;
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  require_defined(x, "linear");
  require_defined(weight, "linear");
  require_defined(bias, "linear");
  if (x.rank() < 1 || weight.rank() != 2 || x.shape().back() != weight.dim(0) ||
      bias.rank() != 1 || bias.dim(0) != weight.dim(1)) {
    throw DimensionError("linear: input " + to_string(x.shape()) + " with weight " +
                         to_string(weight.shape()) + " and bias " + to_string(bias.shape()));
  }
  const auto k = static_cast<Eigen::Index>(weight.dim(0));
  const auto n = static_cast<Eigen::Index>(weight.dim(1));
  const auto m = static_cast<Eigen::Index>(x.numel() / weight.dim(0));
  Shape out_shape = x.shape();
  out_shape.back() = weight.dim(1);
  std::vector<float> out(static_cast<std::size_t>(m * n));
  MutMap om(out.data(), m, n);
  om.noalias() = ConstMap(x.values().data(), m, k) * ConstMap(weight.values().data(), k, n);
  om.rowwise() += Eigen::Map<const Eigen::RowVectorXf>(bias.values().data(), n);
  const bool track = tracked({&x, &weight, &bias});
  Tensor result = make_output(std::move(out_shape), std::move(out), track);
  if (track) {
    NodePtr xn = x.node(), wn = weight.node(), bn = bias.node(), on = result.node();
    record("linear", {xn, wn, bn}, result, [xn, wn, bn, on, m, k, n] {
      ConstMap g(on->grad.data(), m, n);
      if (xn->requires_grad) {
        MutMap(xn->ensure_grad().data(), m, k).noalias() +=
            g * ConstMap(wn->value.data(), k, n).transpose();
      }
      if (wn->requires_grad) {
        MutMap(wn->ensure_grad().data(), k, n).noalias() +=
            ConstMap(xn->value.data(), m, k).transpose() * g;
      }
      if (bn->requires_grad) {
        std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
        for (Eigen::Index r = 0; r < m; ++r)
          for (Eigen::Index c = 0; c < n; ++c) acc[static_cast<std::size_t>(c)] += g(r, c);
        flush(bn->ensure_grad(), acc);
      }
    });
  }
  return result;
}

Tensor conv1d_valid(const Tensor& series, const Tensor& kernel, const Tensor& bias) {
  require_defined(series, "conv1d_valid");
  require_defined(kernel, "conv1d_valid");
  require_defined(bias, "conv1d_valid");
  if (series.rank() < 2 || kernel.rank() != 3 || bias.rank() != 1 ||
      kernel.dim(1) != series.shape().back() || bias.dim(0) != kernel.dim(2)) {
    throw DimensionError("conv1d_valid: series " + to_string(series.shape()) + ", kernel " +
                         to_string(kernel.shape()) + ", bias " + to_string(bias.shape()));
  }
  const std::size_t r = series.rank();
  const std::size_t steps = series.dim(r - 2);
  const std::size_t cin = series.dim(r - 1);
  const std::size_t width = kernel.dim(0);
  const std::size_t cout = kernel.dim(2);
  if (steps < width) {
    throw SeriesTooShortError("conv1d_valid: series length " + std::to_string(steps) +
                              " shorter than kernel size " + std::to_string(width));
  }
  const std::size_t out_steps = steps - width + 1;
  const std::size_t batch = series.numel() / (steps * cin);
  // Every window of `width` consecutive rows is contiguous, so one strided map
  // over all rows acts as im2col; rows that straddle two series are discarded.
  const auto rows = static_cast<Eigen::Index>(batch * steps - width + 1);
  const auto patch = static_cast<Eigen::Index>(width * cin);
  const auto ci = static_cast<Eigen::Index>(cin);
  const auto co = static_cast<Eigen::Index>(cout);

  RowMat full = ConstStridedMap(series.values().data(), rows, patch, Eigen::OuterStride<>(ci)) *
                ConstMap(kernel.values().data(), patch, co);
  Shape out_shape = series.shape();
  out_shape[r - 2] = out_steps;
  out_shape[r - 1] = cout;
  std::vector<float> out(batch * out_steps * cout);
  auto bv = bias.values();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < out_steps; ++t) {
      const auto src = static_cast<Eigen::Index>(b * steps + t);
      float* dst = out.data() + (b * out_steps + t) * cout;
      for (std::size_t c = 0; c < cout; ++c) dst[c] = full(src, static_cast<Eigen::Index>(c)) + bv[c];
    }
  }
  const bool track = tracked({&series, &kernel, &bias});
  Tensor result = make_output(std::move(out_shape), std::move(out), track);
  if (track) {
    NodePtr sn = series.node(), kn = kernel.node(), bn = bias.node(), on = result.node();
    record("conv1d_valid", {sn, kn, bn}, result,
           [sn, kn, bn, on, batch, steps, out_steps, width, cin, cout, rows, patch, ci, co] {
             const auto& g = on->grad;
             RowMat gfull = RowMat::Zero(rows, co);
             for (std::size_t b = 0; b < batch; ++b)
               for (std::size_t t = 0; t < out_steps; ++t)
                 for (std::size_t c = 0; c < cout; ++c)
                   gfull(static_cast<Eigen::Index>(b * steps + t), static_cast<Eigen::Index>(c)) =
                       g[(b * out_steps + t) * cout + c];
             if (kn->requires_grad) {
               MutMap(kn->ensure_grad().data(), patch, co).noalias() +=
                   ConstStridedMap(sn->value.data(), rows, patch, Eigen::OuterStride<>(ci))
                       .transpose() *
                   gfull;
             }
             if (sn->requires_grad) {
               float* sg = sn->ensure_grad().data();
               for (std::size_t tau = 0; tau < width; ++tau) {
                 MutMap(sg + tau * cin, rows, ci).noalias() +=
                     gfull * ConstMap(kn->value.data() + tau * cin * cout, ci, co).transpose();
               }
             }
             if (bn->requires_grad) {
               std::vector<double> acc(cout, 0.0);
               for (std::size_t i = 0; i < g.size(); ++i) acc[i % cout] += g[i];
               flush(bn->ensure_grad(), acc);
             }
           });
  }
  return result;
}

Tensor add(const Tensor& a, const Tensor& b) { return binary(a, b, BinaryKind::add, "add"); }
Tensor sub(const Tensor& a, const Tensor& b) { return binary(a, b, BinaryKind::sub, "sub"); }
Tensor mul(const Tensor& a, const Tensor& b) { return binary(a, b, BinaryKind::mul, "mul"); }

Tensor relu(const Tensor& a) {
  require_defined(a, "relu");
  auto av = a.values();
  std::vector<float> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] > 0.0f ? av[i] : 0.0f;
  const bool track = tracked({&a});
  Tensor result = make_output(a.shape(), std::move(out), track);
  if (track) {
    NodePtr an = a.node(), on = result.node();
    record("relu", {an}, result, [an, on] {
      auto ag = an->ensure_grad();
      for (std::size_t i = 0; i < ag.size(); ++i)
        if (an->value[i] > 0.0f) ag[i] += on->grad[i];
    });
  }
  return result;
}

Tensor tanh(const Tensor& a) {
  require_defined(a, "tanh");
  auto av = a.values();
  std::vector<float> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = std::tanh(av[i]);
  const bool track = tracked({&a});
  Tensor result = make_output(a.shape(), std::move(out), track);
  if (track) {
    NodePtr an = a.node(), on = result.node();
    record("tanh", {an}, result, [an, on] {
      auto ag = an->ensure_grad();
      for (std::size_t i = 0; i < ag.size(); ++i) {
        const float y = on->value[i];
        ag[i] += on->grad[i] * (1.0f - y * y);
      }
    });
  }
  return result;
}

Tensor scale(const Tensor& a, float alpha) {
  require_defined(a, "scale");
  auto av = a.values();
  std::vector<float> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = alpha * av[i];
  const bool track = tracked({&a});
  Tensor result = make_output(a.shape(), std::move(out), track);
  if (track) {
    NodePtr an = a.node(), on = result.node();
    record("scale", {an}, result, [an, on, alpha] {
      auto ag = an->ensure_grad();
      for (std::size_t i = 0; i < ag.size(); ++i) ag[i] += alpha * on->grad[i];
    });
  }
  return result;
}

Tensor concat(const Tensor& a, const Tensor& b, std::size_t axis) {
  require_defined(a, "concat");
  require_defined(b, "concat");
  bool ok = a.rank() == b.rank() && axis < a.rank();
  for (std::size_t i = 0; ok && i < a.rank(); ++i)
    if (i != axis && a.dim(i) != b.dim(i)) ok = false;
  if (!ok) {
    throw DimensionError("concat along axis " + std::to_string(axis) + ": incompatible shapes " +
                         pair_str(a, b));
  }
  const std::size_t outer = product(a.shape(), 0, axis);
  const std::size_t inner = product(a.shape(), axis + 1, a.rank());
  const std::size_t la = a.dim(axis) * inner;
  const std::size_t lb = b.dim(axis) * inner;
  Shape out_shape = a.shape();
  out_shape[axis] += b.dim(axis);
  std::vector<float> out(outer * (la + lb));
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t o = 0; o < outer; ++o) {
    std::copy_n(av.data() + o * la, la, out.data() + o * (la + lb));
    std::copy_n(bv.data() + o * lb, lb, out.data() + o * (la + lb) + la);
  }
  const bool track = tracked({&a, &b});
  Tensor result = make_output(std::move(out_shape), std::move(out), track);
  if (track) {
    NodePtr an = a.node(), bn = b.node(), on = result.node();
    record("concat", {an, bn}, result, [an, bn, on, outer, la, lb] {
      const float* g = on->grad.data();
      if (an->requires_grad) {
        float* ag = an->ensure_grad().data();
        for (std::size_t o = 0; o < outer; ++o)
          for (std::size_t i = 0; i < la; ++i) ag[o * la + i] += g[o * (la + lb) + i];
      }
      if (bn->requires_grad) {
        float* bg = bn->ensure_grad().data();
        for (std::size_t o = 0; o < outer; ++o)
          for (std::size_t i = 0; i < lb; ++i) bg[o * lb + i] += g[o * (la + lb) + la + i];
      }
    });
  }
  return result;
}

Tensor concat_last(const Tensor& a, const Tensor& b) {
  require_defined(a, "concat_last");
  if (a.rank() == 0) throw DimensionError("concat_last: scalar operand");
  return concat(a, b, a.rank() - 1);
}

Tensor slice(const Tensor& a, std::size_t axis, std::size_t start, std::size_t length) {
  require_defined(a, "slice");
  if (axis >= a.rank() || length == 0 || start + length > a.dim(axis)) {
    throw DimensionError("slice [" + std::to_string(start) + ", " +
                         std::to_string(start + length) + ") on axis " + std::to_string(axis) +
                         " of " + to_string(a.shape()));
  }
  const std::size_t outer = product(a.shape(), 0, axis);
  const std::size_t inner = product(a.shape(), axis + 1, a.rank());
  const std::size_t src_len = a.dim(axis) * inner;
  const std::size_t len = length * inner;
  const std::size_t offset = start * inner;
  Shape out_shape = a.shape();
  out_shape[axis] = length;
  std::vector<float> out(outer * len);
  auto av = a.values();
  for (std::size_t o = 0; o < outer; ++o)
    std::copy_n(av.data() + o * src_len + offset, len, out.data() + o * len);
  const bool track = tracked({&a});
  Tensor result = make_output(std::move(out_shape), std::move(out), track);
  if (track) {
    NodePtr an = a.node(), on = result.node();
    record("slice", {an}, result, [an, on, outer, src_len, len, offset] {
      float* ag = an->ensure_grad().data();
      const float* g = on->grad.data();
      for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < len; ++i) ag[o * src_len + offset + i] += g[o * len + i];
    });
  }
  return result;
}

Tensor reshape(const Tensor& a, Shape shape) {
  require_defined(a, "reshape");
  if (numel(shape) != a.numel()) {
    throw DimensionError("reshape " + to_string(a.shape()) + " to " + to_string(shape));
  }
  const bool track = tracked({&a});
  Tensor result = make_output(std::move(shape), std::vector<float>(a.values().begin(), a.values().end()),
                              track);
  if (track) {
    NodePtr an = a.node(), on = result.node();
    record("reshape", {an}, result, [an, on] {
      auto ag = an->ensure_grad();
      for (std::size_t i = 0; i < ag.size(); ++i) ag[i] += on->grad[i];
    });
  }
  return result;
}

Tensor gather_rows(const Tensor& a, std::span<const std::uint32_t> idx) {
  require_defined(a, "gather_rows");
  if (a.rank() == 0 || idx.empty()) {
    throw DimensionError("gather_rows: need a non-scalar source and at least one index, got " +
                         to_string(a.shape()));
  }
  const std::size_t rows = a.dim(0);
  const std::size_t width = a.numel() / rows;
  for (auto i : idx)
    if (i >= rows) throw IndexError("gather_rows: index " + std::to_string(i) + " >= " + std::to_string(rows));
  Shape out_shape = a.shape();
  out_shape[0] = idx.size();
  std::vector<float> out(idx.size() * width);
  auto av = a.values();
  for (std::size_t r = 0; r < idx.size(); ++r)
    std::copy_n(av.data() + idx[r] * width, width, out.data() + r * width);
  const bool track = tracked({&a});
  Tensor result = make_output(std::move(out_shape), std::move(out), track);
  if (track) {
    NodePtr an = a.node(), on = result.node();
    auto index = std::make_shared<std::vector<std::uint32_t>>(idx.begin(), idx.end());
    record("gather_rows", {an}, result, [an, on, index, width] {
      std::vector<double> acc(an->value.size(), 0.0);
      const float* g = on->grad.data();
      for (std::size_t r = 0; r < index->size(); ++r)
        for (std::size_t c = 0; c < width; ++c) acc[(*index)[r] * width + c] += g[r * width + c];
      flush(an->ensure_grad(), acc);
    });
  }
  return result;
}

Tensor segment_sum(const Tensor& a, std::span<const std::uint32_t> segment, std::size_t segments) {
  require_defined(a, "segment_sum");
  if (a.rank() == 0 || a.dim(0) != segment.size() || segments == 0) {
    throw DimensionError("segment_sum: " + std::to_string(segment.size()) +
                         " segment ids for rows of " + to_string(a.shape()));
  }
  for (auto s : segment)
    if (s >= segments) throw IndexError("segment_sum: segment id " + std::to_string(s) + " >= " + std::to_string(segments));
  const std::size_t width = a.numel() / a.dim(0);
  std::vector<double> acc(segments * width, 0.0);
  auto av = a.values();
  for (std::size_t r = 0; r < segment.size(); ++r)
    for (std::size_t c = 0; c < width; ++c) acc[segment[r] * width + c] += av[r * width + c];
  std::vector<float> out(acc.begin(), acc.end());
  Shape out_shape = a.shape();
  out_shape[0] = segments;
  const bool track = tracked({&a});
  Tensor result = make_output(std::move(out_shape), std::move(out), track);
  if (track) {
    NodePtr an = a.node(), on = result.node();
    auto seg = std::make_shared<std::vector<std::uint32_t>>(segment.begin(), segment.end());
    record("segment_sum", {an}, result, [an, on, seg, width] {
      float* ag = an->ensure_grad().data();
      const float* g = on->grad.data();
      for (std::size_t r = 0; r < seg->size(); ++r)
        for (std::size_t c = 0; c < width; ++c) ag[r * width + c] += g[(*seg)[r] * width + c];
    });
  }
  return result;
}

Tensor sum(const Tensor& a) {
  require_defined(a, "sum");
  double total = 0.0;
  for (float v : a.values()) total += v;
  const bool track = tracked({&a});
  Tensor result = make_output(Shape{}, {static_cast<float>(total)}, track);
  if (track) {
    NodePtr an = a.node(), on = result.node();
    record("sum", {an}, result, [an, on] {
      const float g = on->grad[0];
      for (auto& v : an->ensure_grad()) v += g;
    });
  }
  return result;
}

Tensor mse(const Tensor& pred, const Tensor& target) {
  require_defined(pred, "mse");
  require_defined(target, "mse");
  if (pred.shape() != target.shape()) {
    throw DimensionError("mse: shape mismatch " + pair_str(pred, target));
  }
  const std::size_t n = pred.numel();
  auto pv = pred.values();
  auto tv = target.values();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(pv[i]) - tv[i];
    total += d * d;
  }
  const bool track = tracked({&pred, &target});
  Tensor result = make_output(Shape{}, {static_cast<float>(total / static_cast<double>(n))}, track);
  if (track) {
    NodePtr pn = pred.node(), tn = target.node(), on = result.node();
    record("mse", {pn, tn}, result, [pn, tn, on, n] {
      const double g = on->grad[0] * 2.0 / static_cast<double>(n);
      if (pn->requires_grad) {
        auto pg = pn->ensure_grad();
        for (std::size_t i = 0; i < n; ++i)
          pg[i] += static_cast<float>(g * (static_cast<double>(pn->value[i]) - tn->value[i]));
      }
      if (tn->requires_grad) {
        auto tg = tn->ensure_grad();
        for (std::size_t i = 0; i < n; ++i)
          tg[i] -= static_cast<float>(g * (static_cast<double>(pn->value[i]) - tn->value[i]));
      }
    });
  }
  return result;
}

Tensor dropout_mask(const Shape& shape, double p, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ParameterError("dropout probability must lie in [0, 1), got " + std::to_string(p));
  }
  const std::size_t n = numel(shape);
  if (p == 0.0) return Tensor(shape, std::vector<float>(n, 1.0f));
  const float keep = static_cast<float>(1.0 / (1.0 - p));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<float> mask(n);
  for (auto& m : mask) m = uniform(rng) < p ? 0.0f : keep;
  return Tensor(shape, std::move(mask));
}

}  // namespace swarmnet::diff
