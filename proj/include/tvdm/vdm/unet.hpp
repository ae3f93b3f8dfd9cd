#pragma once

#include <array>
#include <vector>

#include "tvdm/vdm/blocks.hpp"
#include "tvdm/vdm/text.hpp"

namespace tvdm::vdm {

struct VdmConfig {
    std::size_t frames = 8;
    std::size_t latent_channels = 4;
    std::size_t base_channels = 32;
    std::size_t groups = 8;
    std::size_t time_dim = 128;
    std::size_t timesteps = 1000;
    std::size_t sampler_steps = 50;
};

// Called between each block's spatial and temporal transformer. features is [B*N, C, h, w];
// the result must have the same shape.
template <typename T>
class MotionHook {
public:
    virtual ~MotionHook() = default;
    virtual Tensor<T> apply(std::size_t block, const Tensor<T>& features, std::size_t frames) const = 0;
};

template <typename T>
class ResBlock {
public:
    ResBlock() = default;
    ResBlock(std::size_t in_channels, std::size_t out_channels, std::size_t time_dim, std::size_t groups, Rng& rng);
    Tensor<T> operator()(const Tensor<T>& x, const Tensor<T>& temb) const;
    void collect(const std::string& prefix, ParamList<T>& out) const;

private:
    numcore::GroupNorm<T> norm1_, norm2_;
    numcore::Conv2d<T> conv1_, conv2_, skip_;
    numcore::Linear<T> time_;
    bool has_skip_ = false;
};

// Self-attention over the h*w sites of a frame, cross-attention to the prompt, feed-forward.
template <typename T>
class SpatialTransformer {
public:
    SpatialTransformer() = default;
    SpatialTransformer(std::size_t channels, std::size_t context_dim, Rng& rng);
    // x [B*N, C, h, w], context [B*N, 1, context_dim]
    Tensor<T> operator()(const Tensor<T>& x, const Tensor<T>& context) const;
    void collect(const std::string& prefix, ParamList<T>& out) const;

private:
    numcore::LayerNorm<T> n1_, n2_, n3_;
    Attention<T> self_, cross_;
    FeedForward<T> ff_;
};

// Self-attention over the N frames at each site, with a frame-position term.
template <typename T>
class TemporalTransformer {
public:
    TemporalTransformer() = default;
    TemporalTransformer(std::size_t channels, Rng& rng);
    Tensor<T> operator()(const Tensor<T>& x, std::size_t frames) const;
    void collect(const std::string& prefix, ParamList<T>& out) const;

private:
    numcore::LayerNorm<T> n1_, n2_;
    Attention<T> attn_;
    FeedForward<T> ff_;
};

// Two-resolution video U-Net predicting the noise of every frame.
template <typename T>
class UNet {
public:
    static constexpr std::size_t kBlocks = 3;

    UNet(const VdmConfig& config, Rng& rng);

    // noisy [B, N, c, h, w], t one per video, cond [B, c, h, w] (latent of the conditioned frame),
    // text [B, kTextDim]. Returns [B, N, c, h, w]. hook == nullptr is the plain backbone.
    Tensor<T> forward(const Tensor<T>& noisy, const std::vector<std::size_t>& t, const Tensor<T>& cond,
                      const Tensor<T>& text, const MotionHook<T>* hook = nullptr) const;

    // Channel width seen by the hook at each block.
    std::array<std::size_t, kBlocks> block_channels() const;
    // Every backbone parameter, including the prompt table.
    ParamList<T> parameters() const;
    const VdmConfig& config() const { return config_; }

    TextEmbedder<T> text;

private:
    struct Stage {
        ResBlock<T> res;
        SpatialTransformer<T> spatial;
        TemporalTransformer<T> temporal;
    };

    Tensor<T> run_stage(std::size_t index, const Tensor<T>& x, const Tensor<T>& temb, const Tensor<T>& context,
                        const MotionHook<T>* hook) const;

    VdmConfig config_;
    numcore::Linear<T> time1_, time2_;
    numcore::Conv2d<T> conv_in_, down_, conv_out_;
    numcore::GroupNorm<T> norm_out_;
    std::array<Stage, kBlocks> stages_;
};

}  // namespace tvdm::vdm
