#pragma once

#include "tvdm/numcore/layers.hpp"

namespace tvdm::vdm {

using numcore::ParamList;
using numcore::Rng;
using numcore::Tensor;

// Single-head attention with separate query and key/value widths.
template <typename T>
class Attention {
public:
    Attention() = default;
    Attention(std::size_t query_dim, std::size_t context_dim, std::size_t inner_dim, Rng& rng, bool zero_out = false);

    // x [B, L, query_dim], context [B, Lk, context_dim] -> [B, L, query_dim]
    Tensor<T> operator()(const Tensor<T>& x, const Tensor<T>& context) const;
    void collect(const std::string& prefix, ParamList<T>& out) const;

private:
    numcore::Linear<T> q_, k_, v_, o_;
};

template <typename T>
class FeedForward {
public:
    FeedForward() = default;
    FeedForward(std::size_t dim, std::size_t hidden, Rng& rng);
    Tensor<T> operator()(const Tensor<T>& x) const { return out_(numcore::silu(in_(x))); }
    void collect(const std::string& prefix, ParamList<T>& out) const;

private:
    numcore::Linear<T> in_, out_;
};

// Sinusoidal features of a scalar position, [count, dim] for positions given.
template <typename T>
Tensor<T> sinusoidal_embedding(const std::vector<double>& positions, std::size_t dim);

// [B*N, C, h, w] <-> [B*h*w, N, C] (one token sequence per spatial site).
template <typename T>
Tensor<T> to_temporal_tokens(const Tensor<T>& x, std::size_t frames);
template <typename T>
Tensor<T> from_temporal_tokens(const Tensor<T>& tokens, std::size_t frames, std::size_t h, std::size_t w);

// [B*N, C, h, w] <-> [B*N, h*w, C].
template <typename T>
Tensor<T> to_spatial_tokens(const Tensor<T>& x);
template <typename T>
Tensor<T> from_spatial_tokens(const Tensor<T>& tokens, std::size_t h, std::size_t w);

// Frame-index encoding repeated for every site: [sites, N, C].
template <typename T>
Tensor<T> frame_positions(std::size_t sites, std::size_t frames, std::size_t dim);

}  // namespace tvdm::vdm
