#pragma once

#include "tvdm/numcore/layers.hpp"

namespace tvdm::autoenc {

using numcore::ParamList;
using numcore::Rng;
using numcore::Tensor;

// Vanilla convolutional VAE with an 8x spatial downscale.
struct VaeConfig {
    std::size_t latent_channels = 4;
    std::size_t base_channels = 32;
    std::size_t mid_channels = 64;
};

template <typename T>
struct Posterior {
    Tensor<T> mean;    // [B, c, H/8, W/8]
    Tensor<T> logvar;  // same shape
};

template <typename T>
class Vae {
public:
    Vae(const VaeConfig& config, Rng& rng);

    // rgb [B, 3, H, W] with H, W multiples of 8.
    Posterior<T> encode(const Tensor<T>& rgb) const;
    // Output passes through a sigmoid, so it always lies in [0, 1].
    Tensor<T> decode(const Tensor<T>& z) const;

    ParamList<T> parameters() const;
    const VaeConfig& config() const { return config_; }

private:
    VaeConfig config_;
    numcore::Conv2d<T> enc_in_, enc_d1_, enc_d2_, enc_d3_, enc_head_;
    numcore::Conv2d<T> dec_in_, dec_u1_, dec_u2_, dec_u3_, dec_out_;
};

// mean + exp(logvar / 2) * eps. logvar = -inf gives exactly the mean.
template <typename T>
Tensor<T> sample_posterior(const Posterior<T>& posterior, Rng& rng);

// KL(q || N(0, I)) summed over elements, averaged over the batch.
template <typename T>
Tensor<T> kl_divergence(const Posterior<T>& posterior);

}  // namespace tvdm::autoenc
