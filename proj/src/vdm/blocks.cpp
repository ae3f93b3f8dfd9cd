#include "tvdm/vdm/blocks.hpp"

#include <cmath>

#include "tvdm/numcore/errors.hpp"

namespace tvdm::vdm {

using namespace numcore;

template <typename T>
Attention<T>::Attention(std::size_t query_dim, std::size_t context_dim, std::size_t inner_dim, Rng& rng, bool zero_out)
    : q_(query_dim, inner_dim, rng, false, false),
      k_(context_dim, inner_dim, rng, false, false),
      v_(context_dim, inner_dim, rng, false, false),
      o_(inner_dim, query_dim, rng, zero_out) {}

template <typename T>
Tensor<T> Attention<T>::operator()(const Tensor<T>& x, const Tensor<T>& context) const {
    return o_(scaled_dot_attention(q_(x), k_(context), v_(context)));
}

template <typename T>
void Attention<T>::collect(const std::string& prefix, ParamList<T>& out) const {
    q_.collect(prefix + ".q", out);
    k_.collect(prefix + ".k", out);
    v_.collect(prefix + ".v", out);
    o_.collect(prefix + ".o", out);
}

template <typename T>
FeedForward<T>::FeedForward(std::size_t dim, std::size_t hidden, Rng& rng) : in_(dim, hidden, rng), out_(hidden, dim, rng) {}

template <typename T>
void FeedForward<T>::collect(const std::string& prefix, ParamList<T>& out) const {
    in_.collect(prefix + ".in", out);
    out_.collect(prefix + ".out", out);
}

template <typename T>
Tensor<T> sinusoidal_embedding(const std::vector<double>& positions, std::size_t dim) {
    if (dim < 2 || dim % 2 != 0) throw ConfigError("sinusoidal embedding width must be even, got " + std::to_string(dim));
    const std::size_t half = dim / 2;
    std::vector<T> data(positions.size() * dim);
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t k = 0; k < half; ++k) {
            const double freq = std::exp(-std::log(10000.0) * static_cast<double>(k) / static_cast<double>(half));
            data[i * dim + k] = static_cast<T>(std::sin(positions[i] * freq));
            data[i * dim + half + k] = static_cast<T>(std::cos(positions[i] * freq));
        }
    }
    return Tensor<T>({positions.size(), dim}, std::move(data));
}

template <typename T>
Tensor<T> to_temporal_tokens(const Tensor<T>& x, std::size_t frames) {
    const std::size_t bn = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    if (frames == 0 || bn % frames != 0) {
        throw ShapeError("temporal tokens: batch " + std::to_string(bn) + " is not a multiple of " + std::to_string(frames) + " frames");
    }
    const std::size_t b = bn / frames;
    return reshape(permute(reshape(x, {b, frames, c, h, w}), {0, 3, 4, 1, 2}), {b * h * w, frames, c});
}

template <typename T>
Tensor<T> from_temporal_tokens(const Tensor<T>& tokens, std::size_t frames, std::size_t h, std::size_t w) {
    const std::size_t c = tokens.dim(2), b = tokens.dim(0) / (h * w);
    return reshape(permute(reshape(tokens, {b, h, w, frames, c}), {0, 3, 4, 1, 2}), {b * frames, c, h, w});
}

template <typename T>
Tensor<T> to_spatial_tokens(const Tensor<T>& x) {
    return permute(reshape(x, {x.dim(0), x.dim(1), x.dim(2) * x.dim(3)}), {0, 2, 1});
}

template <typename T>
Tensor<T> from_spatial_tokens(const Tensor<T>& tokens, std::size_t h, std::size_t w) {
    return reshape(permute(tokens, {0, 2, 1}), {tokens.dim(0), tokens.dim(2), h, w});
}

template <typename T>
Tensor<T> frame_positions(std::size_t sites, std::size_t frames, std::size_t dim) {
    std::vector<double> pos(frames);
    for (std::size_t i = 0; i < frames; ++i) pos[i] = static_cast<double>(i);
    const auto one = sinusoidal_embedding<T>(pos, dim);
    std::vector<T> data;
    data.reserve(sites * one.numel());
    for (std::size_t s = 0; s < sites; ++s) data.insert(data.end(), one.data().begin(), one.data().end());
    return Tensor<T>({sites, frames, dim}, std::move(data));
}

#define TVDM_INSTANTIATE(T)                                                                     \
    template class Attention<T>;                                                                \
    template class FeedForward<T>;                                                              \
    template Tensor<T> sinusoidal_embedding<T>(const std::vector<double>&, std::size_t);        \
    template Tensor<T> to_temporal_tokens(const Tensor<T>&, std::size_t);                       \
    template Tensor<T> from_temporal_tokens(const Tensor<T>&, std::size_t, std::size_t, std::size_t); \
    template Tensor<T> to_spatial_tokens(const Tensor<T>&);                                     \
    template Tensor<T> from_spatial_tokens(const Tensor<T>&, std::size_t, std::size_t);         \
    template Tensor<T> frame_positions<T>(std::size_t, std::size_t, std::size_t);

TVDM_INSTANTIATE(float)
TVDM_INSTANTIATE(double)

}  // namespace tvdm::vdm
