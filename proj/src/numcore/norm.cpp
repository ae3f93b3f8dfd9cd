#include <cmath>

#include "op_builder.hpp"
#include "tvdm/numcore/ops.hpp"

namespace tvdm::numcore {

using detail::grad_of;
using detail::make_result;

namespace {

// Shared normalize-then-affine kernel. Elements are grouped into `count` contiguous segments of
// `seg_len` values each; segment s uses statistics `stats_of(s)`, element j of a segment has
// affine channel `channel_of(s, j)`.
template <typename T, typename ChannelOf>
Tensor<T> normalize_affine(const char* op, const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                           std::size_t count, std::size_t seg_len, T eps, ChannelOf channel_of) {
    const auto in = x.data();
    const auto g = gamma.data();
    const auto b = beta.data();
    std::vector<T> xhat(in.size());
    std::vector<T> inv_std(count);
    std::vector<T> out(in.size());
    for (std::size_t s = 0; s < count; ++s) {
        const T* seg = in.data() + s * seg_len;
        T mu = T(0);
        for (std::size_t j = 0; j < seg_len; ++j) mu += seg[j];
        mu /= static_cast<T>(seg_len);
        T var = T(0);
        for (std::size_t j = 0; j < seg_len; ++j) var += (seg[j] - mu) * (seg[j] - mu);
        var /= static_cast<T>(seg_len);
        const T istd = T(1) / std::sqrt(var + eps);
        inv_std[s] = istd;
        for (std::size_t j = 0; j < seg_len; ++j) {
            const std::size_t idx = s * seg_len + j;
            xhat[idx] = (seg[j] - mu) * istd;
            const std::size_t c = channel_of(s, j);
            out[idx] = xhat[idx] * g[c] + b[c];
        }
    }
    return make_result<T>(op, x.shape(), std::move(out), {x, gamma, beta},
                          [x, gamma, beta, count, seg_len, channel_of, xhat = std::move(xhat),
                           inv_std = std::move(inv_std)](Node<T>& self) {
                              const T* dy = self.grad.data();
                              const auto g = gamma.data();
                              T* gx = grad_of(x);
                              T* gg = grad_of(gamma);
                              T* gb = grad_of(beta);
                              const T inv_n = T(1) / static_cast<T>(seg_len);
                              for (std::size_t s = 0; s < count; ++s) {
                                  T sum_dxhat = T(0);
                                  T sum_dxhat_xhat = T(0);
                                  for (std::size_t j = 0; j < seg_len; ++j) {
                                      const std::size_t idx = s * seg_len + j;
                                      const std::size_t c = channel_of(s, j);
                                      const T dxhat = dy[idx] * g[c];
                                      sum_dxhat += dxhat;
                                      sum_dxhat_xhat += dxhat * xhat[idx];
                                      if (gg) gg[c] += dy[idx] * xhat[idx];
                                      if (gb) gb[c] += dy[idx];
                                  }
                                  if (!gx) continue;
                                  for (std::size_t j = 0; j < seg_len; ++j) {
                                      const std::size_t idx = s * seg_len + j;
                                      const T dxhat = dy[idx] * g[channel_of(s, j)];
                                      gx[idx] += inv_std[s] * (dxhat - inv_n * sum_dxhat - xhat[idx] * inv_n * sum_dxhat_xhat);
                                  }
                              }
                          });
}

}  // namespace

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta, T eps) {
    const std::size_t d = x.dim(x.rank() - 1);
    if (gamma.numel() != d || beta.numel() != d) {
        throw ShapeError("layer_norm: gamma/beta must have " + std::to_string(d) + " elements");
    }
    return normalize_affine<T>("layer_norm", x, gamma, beta, x.numel() / d, d, eps,
                               [](std::size_t, std::size_t j) { return j; });
}

template <typename T>
Tensor<T> group_norm(const Tensor<T>& x, std::size_t groups, const Tensor<T>& gamma, const Tensor<T>& beta, T eps) {
    if (x.rank() < 2) throw ShapeError("group_norm: expected [B, C, ...], got " + shape_str(x.shape()));
    const std::size_t channels = x.dim(1);
    if (groups == 0 || channels % groups != 0) {
        throw ConfigError("group_norm: " + std::to_string(groups) + " groups do not divide " + std::to_string(channels) +
                          " channels");
    }
    if (gamma.numel() != channels || beta.numel() != channels) {
        throw ShapeError("group_norm: gamma/beta must have " + std::to_string(channels) + " elements");
    }
    const std::size_t spatial = x.numel() / (x.dim(0) * channels);
    const std::size_t per_group = channels / groups;
    const std::size_t seg_len = per_group * spatial;
    return normalize_affine<T>("group_norm", x, gamma, beta, x.dim(0) * groups, seg_len, eps,
                               [groups, per_group, spatial](std::size_t s, std::size_t j) {
                                   return (s % groups) * per_group + j / spatial;
                               });
}

template Tensor<float> layer_norm(const Tensor<float>&, const Tensor<float>&, const Tensor<float>&, float);
template Tensor<double> layer_norm(const Tensor<double>&, const Tensor<double>&, const Tensor<double>&, double);
template Tensor<float> group_norm(const Tensor<float>&, std::size_t, const Tensor<float>&, const Tensor<float>&, float);
template Tensor<double> group_norm(const Tensor<double>&, std::size_t, const Tensor<double>&, const Tensor<double>&,
                                   double);

}  // namespace tvdm::numcore
