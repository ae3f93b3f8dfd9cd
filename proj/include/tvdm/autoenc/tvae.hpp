#pragma once

#include <array>

#include "tvdm/autoenc/vae.hpp"

namespace tvdm::autoenc {

struct TvaeConfig {
    std::size_t latent_channels = 4;
    std::array<std::size_t, 3> encoder_channels{16, 32, 64};
    std::array<std::size_t, 3> decoder_channels{16, 32, 64};
};

// z + z_alpha. Only constructible from its two parts.
template <typename T>
class AdjustedLatent {
public:
    AdjustedLatent(const Tensor<T>& z, const Tensor<T>& z_alpha);
    const Tensor<T>& tensor() const { return value_; }

private:
    Tensor<T> value_;
};

template <typename T>
struct TransparentDecoded {
    Tensor<T> rgb;    // [B, 3, H, W]
    Tensor<T> alpha;  // [B, 1, H, W]
};

template <typename T>
class Tvae {
public:
    Tvae(const TvaeConfig& config, Rng& rng);

    // rgb [B, 3, H, W], alpha [B, 1, H, W] -> z_alpha [B, c, H/8, W/8]. The last layer starts at
    // zero, so an untrained encoder yields z_alpha = 0.
    Tensor<T> encode(const Tensor<T>& rgb, const Tensor<T>& alpha) const;
    // Pixel-space U-Net over the VAE reconstruction, with the adjusted latent joined at the bottleneck.
    TransparentDecoded<T> decode(const Tensor<T>& rgb_hat, const AdjustedLatent<T>& z_adj) const;

    ParamList<T> encoder_parameters() const;
    ParamList<T> decoder_parameters() const;
    ParamList<T> parameters() const;
    const TvaeConfig& config() const { return config_; }

private:
    TvaeConfig config_;
    numcore::Conv2d<T> enc_in_, enc_d1_, enc_d2_, enc_d3_, enc_out_;
    numcore::Conv2d<T> a0_, a1_, b0_, b1_, c0_, c1_, c2_, u1_, u0_, out_;
};

// Everything one stage-1 step computes. z is the frozen VAE's posterior mean.
template <typename T>
struct TvaePass {
    Tensor<T> z;
    Tensor<T> z_alpha;
    Tensor<T> rgb_hat;  // frozen VAE decode of z + z_alpha
    TransparentDecoded<T> out;
};

// raw_rgb and alpha feed the TVAE encoder; smooth_rgb feeds the frozen VAE encoder.
template <typename T>
TvaePass<T> tvae_forward(const Vae<T>& vae, const Tvae<T>& tvae, const Tensor<T>& raw_rgb,
                         const Tensor<T>& smooth_rgb, const Tensor<T>& alpha);

// Losses sum over pixels and channels and average over the batch.
// ||target - D*(z + z_alpha)||^2
template <typename T>
Tensor<T> loss_identity(const Tensor<T>& target, const Tensor<T>& rgb_hat);
template <typename T>
Tensor<T> loss_identity(const Tensor<T>& target, const Tensor<T>& z, const Tensor<T>& z_alpha, const Vae<T>& vae);
// ||rgb - rgb_pred||^2 + ||alpha - alpha_pred||^2
template <typename T>
Tensor<T> loss_recon(const Tensor<T>& rgb, const Tensor<T>& alpha, const Tensor<T>& rgb_pred,
                     const Tensor<T>& alpha_pred);
// recon + lambda * identity. lambda < 0 throws ConfigError.
template <typename T>
Tensor<T> loss_tvae(const Tensor<T>& recon, const Tensor<T>& identity, double lambda);

}  // namespace tvdm::autoenc
