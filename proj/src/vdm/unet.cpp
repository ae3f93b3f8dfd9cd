#include "tvdm/vdm/unet.hpp"

#include "tvdm/numcore/errors.hpp"

namespace tvdm::vdm {

using namespace numcore;

template <typename T>
ResBlock<T>::ResBlock(std::size_t in_channels, std::size_t out_channels, std::size_t time_dim, std::size_t groups,
                      Rng& rng)
    : norm1_(groups, in_channels),
      norm2_(groups, out_channels),
      conv1_(in_channels, out_channels, 3, 1, rng),
      conv2_(out_channels, out_channels, 3, 1, rng),
      time_(time_dim, out_channels, rng),
      has_skip_(in_channels != out_channels) {
    if (has_skip_) skip_ = Conv2d<T>(in_channels, out_channels, 1, 1, rng);
}

template <typename T>
Tensor<T> ResBlock<T>::operator()(const Tensor<T>& x, const Tensor<T>& temb) const {
    auto h = conv1_(silu(norm1_(x)));
    h = add_channel_broadcast(h, time_(silu(temb)));
    h = conv2_(silu(norm2_(h)));
    return add(has_skip_ ? skip_(x) : x, h);
}

template <typename T>
void ResBlock<T>::collect(const std::string& prefix, ParamList<T>& out) const {
    norm1_.collect(prefix + ".norm1", out);
    conv1_.collect(prefix + ".conv1", out);
    time_.collect(prefix + ".time", out);
    norm2_.collect(prefix + ".norm2", out);
    conv2_.collect(prefix + ".conv2", out);
    if (has_skip_) skip_.collect(prefix + ".skip", out);
}

template <typename T>
SpatialTransformer<T>::SpatialTransformer(std::size_t channels, std::size_t context_dim, Rng& rng)
    : n1_(channels),
      n2_(channels),
      n3_(channels),
      self_(channels, channels, channels, rng),
      cross_(channels, context_dim, channels, rng),
      ff_(channels, 2 * channels, rng) {}

template <typename T>
Tensor<T> SpatialTransformer<T>::operator()(const Tensor<T>& x, const Tensor<T>& context) const {
    auto tok = to_spatial_tokens(x);
    const auto a = n1_(tok);
    tok = add(tok, self_(a, a));
    tok = add(tok, cross_(n2_(tok), context));
    tok = add(tok, ff_(n3_(tok)));
    return from_spatial_tokens(tok, x.dim(2), x.dim(3));
}

template <typename T>
void SpatialTransformer<T>::collect(const std::string& prefix, ParamList<T>& out) const {
    n1_.collect(prefix + ".norm1", out);
    self_.collect(prefix + ".self", out);
    n2_.collect(prefix + ".norm2", out);
    cross_.collect(prefix + ".cross", out);
    n3_.collect(prefix + ".norm3", out);
    ff_.collect(prefix + ".ff", out);
}

template <typename T>
TemporalTransformer<T>::TemporalTransformer(std::size_t channels, Rng& rng)
    : n1_(channels), n2_(channels), attn_(channels, channels, channels, rng), ff_(channels, 2 * channels, rng) {}

template <typename T>
Tensor<T> TemporalTransformer<T>::operator()(const Tensor<T>& x, std::size_t frames) const {
    auto tok = to_temporal_tokens(x, frames);
    const auto a = add(n1_(tok), frame_positions<T>(tok.dim(0), frames, tok.dim(2)));
    tok = add(tok, attn_(a, a));
    tok = add(tok, ff_(n2_(tok)));
    return from_temporal_tokens(tok, frames, x.dim(2), x.dim(3));
}

template <typename T>
void TemporalTransformer<T>::collect(const std::string& prefix, ParamList<T>& out) const {
    n1_.collect(prefix + ".norm1", out);
    attn_.collect(prefix + ".attn", out);
    n2_.collect(prefix + ".norm2", out);
    ff_.collect(prefix + ".ff", out);
}

template <typename T>
UNet<T>::UNet(const VdmConfig& config, Rng& rng) : config_(config) {
    const std::size_t c = config.latent_channels, C = config.base_channels, td = config.time_dim, g = config.groups;
    if (config.frames < 2) throw ConfigError("the video model needs at least 2 frames, got " + std::to_string(config.frames));
    if (c == 0 || C == 0 || C % 2 != 0) throw ConfigError("latent channels must be positive and base channels even");
    if (C % g != 0) throw ConfigError("group count " + std::to_string(g) + " does not divide " + std::to_string(C) + " channels");
    text = TextEmbedder<T>(rng);
    time1_ = Linear<T>(C, td, rng);
    time2_ = Linear<T>(td, td, rng);
    conv_in_ = Conv2d<T>(2 * c, C, 3, 1, rng);
    stages_[0] = {ResBlock<T>(C, C, td, g, rng), SpatialTransformer<T>(C, kTextDim, rng), TemporalTransformer<T>(C, rng)};
    down_ = Conv2d<T>(C, 2 * C, 3, 2, rng);
    stages_[1] = {ResBlock<T>(2 * C, 2 * C, td, g, rng), SpatialTransformer<T>(2 * C, kTextDim, rng),
                  TemporalTransformer<T>(2 * C, rng)};
    stages_[2] = {ResBlock<T>(3 * C, C, td, g, rng), SpatialTransformer<T>(C, kTextDim, rng), TemporalTransformer<T>(C, rng)};
    norm_out_ = GroupNorm<T>(g, C);
    conv_out_ = Conv2d<T>(C, c, 3, 1, rng);
}

template <typename T>
std::array<std::size_t, UNet<T>::kBlocks> UNet<T>::block_channels() const {
    const std::size_t C = config_.base_channels;
    return {C, 2 * C, C};
}

template <typename T>
Tensor<T> UNet<T>::run_stage(std::size_t index, const Tensor<T>& x, const Tensor<T>& temb, const Tensor<T>& context,
                             const MotionHook<T>* hook) const {
    const auto& s = stages_[index];
    auto h = s.spatial(s.res(x, temb), context);
    if (hook) {
        auto hooked = hook->apply(index, h, config_.frames);
        if (hooked.shape() != h.shape()) throw ShapeError("motion hook changed the feature shape at block " + std::to_string(index));
        h = std::move(hooked);
    }
    return s.temporal(h, config_.frames);
}

template <typename T>
Tensor<T> UNet<T>::forward(const Tensor<T>& noisy, const std::vector<std::size_t>& t, const Tensor<T>& cond,
                           const Tensor<T>& text_embed, const MotionHook<T>* hook) const {
    const std::size_t N = config_.frames, c = config_.latent_channels;
    if (noisy.rank() != 5 || noisy.dim(1) != N || noisy.dim(2) != c) {
        throw ShapeError("unet: noisy latents must be [B, " + std::to_string(N) + ", " + std::to_string(c) +
                         ", h, w], got " + shape_str(noisy.shape()));
    }
    const std::size_t B = noisy.dim(0), h = noisy.dim(3), w = noisy.dim(4);
    if (h % 2 != 0 || w % 2 != 0) throw ShapeError("unet: latent grid " + std::to_string(h) + "x" + std::to_string(w) + " must be even");
    if (cond.shape() != Shape{B, c, h, w}) {
        throw ShapeError("unet: conditioning latent " + shape_str(cond.shape()) + " does not match " + shape_str(noisy.shape()));
    }
    if (text_embed.shape() != Shape{B, kTextDim}) throw ShapeError("unet: text embedding must be [B, 64], got " + shape_str(text_embed.shape()));
    if (t.size() != B) throw ShapeError("unet: need one timestep per video");

    std::vector<double> tpos(t.begin(), t.end());
    const auto temb_video = time2_(silu(time1_(sinusoidal_embedding<T>(tpos, config_.base_channels))));
    const auto temb = repeat_batch(temb_video, N);
    const auto context = reshape(repeat_batch(text_embed, N), {B * N, 1, kTextDim});

    const auto x = concat<T>({reshape(noisy, {B * N, c, h, w}), repeat_batch(cond, N)}, 1);
    const auto h0 = run_stage(0, conv_in_(x), temb, context, hook);
    const auto h1 = run_stage(1, down_(h0), temb, context, hook);
    const auto h2 = run_stage(2, concat<T>({upsample_nearest(h1, 2), h0}, 1), temb, context, hook);
    const auto out = conv_out_(silu(norm_out_(h2)));
    return reshape(out, {B, N, c, h, w});
}

template <typename T>
ParamList<T> UNet<T>::parameters() const {
    ParamList<T> out;
    text.collect("text", out);
    time1_.collect("time1", out);
    time2_.collect("time2", out);
    conv_in_.collect("conv_in", out);
    down_.collect("down", out);
    for (std::size_t i = 0; i < kBlocks; ++i) {
        const std::string p = "block" + std::to_string(i);
        stages_[i].res.collect(p + ".res", out);
        stages_[i].spatial.collect(p + ".spatial", out);
        stages_[i].temporal.collect(p + ".temporal", out);
    }
    norm_out_.collect("norm_out", out);
    conv_out_.collect("conv_out", out);
    return out;
}

template class ResBlock<float>;
template class ResBlock<double>;
template class SpatialTransformer<float>;
template class SpatialTransformer<double>;
template class TemporalTransformer<float>;
template class TemporalTransformer<double>;
template class UNet<float>;
template class UNet<double>;

}  // namespace tvdm::vdm
