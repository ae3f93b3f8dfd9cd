#include "tvdm/autoenc/vae.hpp"

#include <cmath>

#include "tvdm/autoenc/image_tensor.hpp"
#include "tvdm/numcore/errors.hpp"

namespace tvdm::autoenc {

using namespace numcore;

template <typename T>
Vae<T>::Vae(const VaeConfig& config, Rng& rng) : config_(config) {
    const std::size_t c = config.latent_channels, b = config.base_channels, m = config.mid_channels;
    if (c == 0 || b == 0 || m == 0) throw ConfigError("VAE channel counts must be positive");
    enc_in_ = Conv2d<T>(3, b, 3, 1, rng);
    enc_d1_ = Conv2d<T>(b, b, 3, 2, rng);
    enc_d2_ = Conv2d<T>(b, m, 3, 2, rng);
    enc_d3_ = Conv2d<T>(m, m, 3, 2, rng);
    enc_head_ = Conv2d<T>(m, 2 * c, 3, 1, rng);
    dec_in_ = Conv2d<T>(c, m, 3, 1, rng);
    dec_u1_ = Conv2d<T>(m, m, 3, 1, rng);
    dec_u2_ = Conv2d<T>(m, b, 3, 1, rng);
    dec_u3_ = Conv2d<T>(b, b, 3, 1, rng);
    dec_out_ = Conv2d<T>(b, 3, 3, 1, rng);
}

template <typename T>
Posterior<T> Vae<T>::encode(const Tensor<T>& rgb) const {
    if (rgb.rank() != 4 || rgb.dim(1) != 3) {
        throw ShapeError("vae encode: expected [B, 3, H, W], got " + shape_str(rgb.shape()));
    }
    require_latent_divisible(rgb.dim(2), rgb.dim(3));
    auto h = silu(enc_in_(rgb));
    h = silu(enc_d1_(h));
    h = silu(enc_d2_(h));
    h = silu(enc_d3_(h));
    const auto stats = enc_head_(h);
    const std::size_t c = config_.latent_channels;
    return {slice(stats, 1, 0, c), slice(stats, 1, c, 2 * c)};
}

template <typename T>
Tensor<T> Vae<T>::decode(const Tensor<T>& z) const {
    if (z.rank() != 4 || z.dim(1) != config_.latent_channels) {
        throw ShapeError("vae decode: expected [B, " + std::to_string(config_.latent_channels) + ", h, w], got " +
                         shape_str(z.shape()));
    }
    auto h = silu(dec_in_(z));
    h = silu(dec_u1_(upsample_nearest(h, 2)));
    h = silu(dec_u2_(upsample_nearest(h, 2)));
    h = silu(dec_u3_(upsample_nearest(h, 2)));
    return sigmoid(dec_out_(h));
}

template <typename T>
ParamList<T> Vae<T>::parameters() const {
    ParamList<T> out;
    enc_in_.collect("enc.in", out);
    enc_d1_.collect("enc.d1", out);
    enc_d2_.collect("enc.d2", out);
    enc_d3_.collect("enc.d3", out);
    enc_head_.collect("enc.head", out);
    dec_in_.collect("dec.in", out);
    dec_u1_.collect("dec.u1", out);
    dec_u2_.collect("dec.u2", out);
    dec_u3_.collect("dec.u3", out);
    dec_out_.collect("dec.out", out);
    return out;
}

template <typename T>
Tensor<T> sample_posterior(const Posterior<T>& posterior, Rng& rng) {
    const auto eps = Tensor<T>::randn(posterior.mean.shape(), rng);
    return add(posterior.mean, mul(exp(scale(posterior.logvar, T(0.5))), eps));
}

template <typename T>
Tensor<T> kl_divergence(const Posterior<T>& posterior) {
    // 0.5 * sum(mu^2 + exp(logvar) - 1 - logvar) / B
    const auto terms = sub(add(square(posterior.mean), exp(posterior.logvar)), add_scalar(posterior.logvar, T(1)));
    return scale(sum(terms), T(0.5) / static_cast<T>(posterior.mean.dim(0)));
}

template class Vae<float>;
template class Vae<double>;
template Tensor<float> sample_posterior(const Posterior<float>&, Rng&);
template Tensor<double> sample_posterior(const Posterior<double>&, Rng&);
template Tensor<float> kl_divergence(const Posterior<float>&);
template Tensor<double> kl_divergence(const Posterior<double>&);

}  // namespace tvdm::autoenc
