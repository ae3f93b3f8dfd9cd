#pragma once

#include <cstddef>
#include <vector>

#include "tvdm/numcore/tensor.hpp"

// Differentiable tensor operations. Every op returns a new tensor; inputs are never modified.
// Shapes follow the NCHW convention for images and [batch, length, dim] for token sequences.
namespace tvdm::numcore {

// Elementwise, identical shapes.
template <typename T> Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> scale(const Tensor<T>& a, T factor);
template <typename T> Tensor<T> add_scalar(const Tensor<T>& a, T value);
template <typename T> Tensor<T> silu(const Tensor<T>& a);
template <typename T> Tensor<T> sigmoid(const Tensor<T>& a);
template <typename T> Tensor<T> exp(const Tensor<T>& a);
template <typename T> Tensor<T> square(const Tensor<T>& a);

// Reductions to a single-element tensor.
template <typename T> Tensor<T> sum(const Tensor<T>& a);
template <typename T> Tensor<T> mean(const Tensor<T>& a);
// sum((a - b)^2)
template <typename T> Tensor<T> sum_squared_error(const Tensor<T>& a, const Tensor<T>& b);

// Layout.
template <typename T> Tensor<T> reshape(const Tensor<T>& a, Shape shape);
template <typename T> Tensor<T> permute(const Tensor<T>& a, const std::vector<std::size_t>& order);
template <typename T> Tensor<T> concat(const std::vector<Tensor<T>>& parts, std::size_t axis);
template <typename T> Tensor<T> slice(const Tensor<T>& a, std::size_t axis, std::size_t begin, std::size_t end);
// [B, ...] -> [B * times, ...]; each sample is repeated `times` times consecutively.
template <typename T> Tensor<T> repeat_batch(const Tensor<T>& a, std::size_t times);
// x[B, C, ...] + v[B, C] broadcast over the trailing dims.
template <typename T> Tensor<T> add_channel_broadcast(const Tensor<T>& x, const Tensor<T>& v);

// Linear algebra. matmul works on [B, M, K] x [B, K, N] with optional per-operand transpose.
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b, bool transpose_a = false, bool transpose_b = false);
// x[..., in] * w[out, in]^T + bias[out]; bias may be undefined.
template <typename T> Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias);
template <typename T> Tensor<T> softmax_lastdim(const Tensor<T>& a);

// Normalization. eps sits inside the square root.
template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta, T eps = T(1e-5));
template <typename T>
Tensor<T> group_norm(const Tensor<T>& x, std::size_t groups, const Tensor<T>& gamma, const Tensor<T>& beta,
                     T eps = T(1e-5));

// Cross-correlation. Kernel extents must be odd, stride 1 or 2. bias may be undefined.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias, std::size_t stride,
                 std::size_t padding);

template <typename T> Tensor<T> upsample_nearest(const Tensor<T>& x, std::size_t factor);
// Half-pixel-centred bilinear resize of [B, C, H, W] to [B, C, out_h, out_w].
template <typename T> Tensor<T> upsample_bilinear(const Tensor<T>& x, std::size_t out_h, std::size_t out_w);

// softmax(q k^T / sqrt(D)) over [B, Lq, D] x [B, Lk, D]; the attention matrix itself.
template <typename T> Tensor<T> attention_weights(const Tensor<T>& q, const Tensor<T>& k);
// softmax(q k^T / sqrt(D)) v
template <typename T> Tensor<T> scaled_dot_attention(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v);

}  // namespace tvdm::numcore
