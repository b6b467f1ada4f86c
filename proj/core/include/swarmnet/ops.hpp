#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "swarmnet/tensor.hpp"

namespace swarmnet::diff {

/// [m x k] * [k x n]. Leading axes of `a` beyond the last two are flattened
/// into rows, so a [B x m x k] operand multiplies as [(B*m) x k].
Tensor matmul(const Tensor& a, const Tensor& b);

/// x[..., k] * weight[k x n] + bias[n].
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

/// Valid-mode 1D convolution along the time axis.
///   series [..., T, Cin], kernel [K, Cin, Cout], bias [Cout] -> [..., T-K+1, Cout]
///   out[t] = sum_{tau<K} series[t+tau] * kernel[tau] + bias
Tensor conv1d_valid(const Tensor& series, const Tensor& kernel, const Tensor& bias);

// Pointwise arithmetic. Broadcasting is limited to leading axes: one operand's
// shape must equal the other's or be a suffix of it.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor relu(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor scale(const Tensor& a, float alpha);

Tensor concat(const Tensor& a, const Tensor& b, std::size_t axis);
Tensor concat_last(const Tensor& a, const Tensor& b);
Tensor slice(const Tensor& a, std::size_t axis, std::size_t start, std::size_t length);
Tensor reshape(const Tensor& a, Shape shape);

/// Rows of `a` viewed as [M, rest...] selected by index -> [idx.size(), rest...].
Tensor gather_rows(const Tensor& a, std::span<const std::uint32_t> idx);

/// out[segment[r]] += a[r] for a viewed as [R, F] -> [segments, F].
Tensor segment_sum(const Tensor& a, std::span<const std::uint32_t> segment,
                   std::size_t segments);

/// Sum of all elements (f64 accumulation) -> scalar.
Tensor sum(const Tensor& a);

/// Mean squared difference over all elements (f64 accumulation) -> scalar.
Tensor mse(const Tensor& pred, const Tensor& target);

/// Inverted-dropout mask: 0 with probability p, else 1/(1-p).
Tensor dropout_mask(const Shape& shape, double p, Rng& rng);

}  // namespace swarmnet::diff
