#include "tvdm/autoenc/tvae.hpp"

#include "tvdm/autoenc/image_tensor.hpp"
#include "tvdm/numcore/errors.hpp"

namespace tvdm::autoenc {

using namespace numcore;

template <typename T>
AdjustedLatent<T>::AdjustedLatent(const Tensor<T>& z, const Tensor<T>& z_alpha) {
    if (z.shape() != z_alpha.shape()) {
        throw ShapeError("adjusted latent: z " + shape_str(z.shape()) + " and z_alpha " + shape_str(z_alpha.shape()) +
                         " differ");
    }
    value_ = add(z, z_alpha);
}

template <typename T>
Tvae<T>::Tvae(const TvaeConfig& config, Rng& rng) : config_(config) {
    const auto [e0, e1, e2] = config.encoder_channels;
    const auto [d0, d1, d2] = config.decoder_channels;
    const std::size_t c = config.latent_channels;
    enc_in_ = Conv2d<T>(4, e0, 3, 1, rng);
    enc_d1_ = Conv2d<T>(e0, e1, 3, 2, rng);
    enc_d2_ = Conv2d<T>(e1, e2, 3, 2, rng);
    enc_d3_ = Conv2d<T>(e2, e2, 3, 2, rng);
    enc_out_ = Conv2d<T>(e2, c, 1, 1, rng, /*zero_init=*/true);
    a0_ = Conv2d<T>(3, d0, 3, 1, rng);
    a1_ = Conv2d<T>(d0, d0, 3, 1, rng);
    b0_ = Conv2d<T>(d0, d1, 3, 2, rng);
    b1_ = Conv2d<T>(d1, d1, 3, 1, rng);
    c0_ = Conv2d<T>(d1, d2, 3, 2, rng);
    c1_ = Conv2d<T>(d2 + c, d2, 3, 1, rng);
    c2_ = Conv2d<T>(d2, d2, 3, 1, rng);
    u1_ = Conv2d<T>(d2 + d1, d1, 3, 1, rng);
    u0_ = Conv2d<T>(d1 + d0, d0, 3, 1, rng);
    out_ = Conv2d<T>(d0, 4, 3, 1, rng);
}

template <typename T>
Tensor<T> Tvae<T>::encode(const Tensor<T>& rgb, const Tensor<T>& alpha) const {
    if (rgb.rank() != 4 || rgb.dim(1) != 3) throw ShapeError("tvae encode: rgb must be [B, 3, H, W], got " + shape_str(rgb.shape()));
    if (alpha.shape() != Shape{rgb.dim(0), 1, rgb.dim(2), rgb.dim(3)}) {
        throw ShapeError("tvae encode: alpha " + shape_str(alpha.shape()) + " does not match rgb " + shape_str(rgb.shape()));
    }
    require_latent_divisible(rgb.dim(2), rgb.dim(3));
    auto h = silu(enc_in_(concat<T>({rgb, alpha}, 1)));
    h = silu(enc_d1_(h));
    h = silu(enc_d2_(h));
    h = silu(enc_d3_(h));
    return enc_out_(h);
}

template <typename T>
TransparentDecoded<T> Tvae<T>::decode(const Tensor<T>& rgb_hat, const AdjustedLatent<T>& z_adj) const {
    const auto& z = z_adj.tensor();
    if (rgb_hat.rank() != 4 || rgb_hat.dim(1) != 3) {
        throw ShapeError("tvae decode: rgb must be [B, 3, H, W], got " + shape_str(rgb_hat.shape()));
    }
    require_latent_divisible(rgb_hat.dim(2), rgb_hat.dim(3));
    const Shape latent{rgb_hat.dim(0), config_.latent_channels, rgb_hat.dim(2) / 8, rgb_hat.dim(3) / 8};
    if (z.shape() != latent) {
        throw ShapeError("tvae decode: latent " + shape_str(z.shape()) + " does not match " + shape_str(latent));
    }
    const auto s0 = silu(a1_(silu(a0_(rgb_hat))));
    const auto s1 = silu(b1_(silu(b0_(s0))));
    auto h = silu(c0_(s1));
    const auto zu = upsample_bilinear(z, h.dim(2), h.dim(3));
    h = silu(c2_(silu(c1_(concat<T>({h, zu}, 1)))));
    h = silu(u1_(concat<T>({upsample_nearest(h, 2), s1}, 1)));
    h = silu(u0_(concat<T>({upsample_nearest(h, 2), s0}, 1)));
    const auto y = sigmoid(out_(h));
    return {slice(y, 1, 0, 3), slice(y, 1, 3, 4)};
}

template <typename T>
ParamList<T> Tvae<T>::encoder_parameters() const {
    ParamList<T> out;
    enc_in_.collect("enc.in", out);
    enc_d1_.collect("enc.d1", out);
    enc_d2_.collect("enc.d2", out);
    enc_d3_.collect("enc.d3", out);
    enc_out_.collect("enc.out", out);
    return out;
}

template <typename T>
ParamList<T> Tvae<T>::decoder_parameters() const {
    ParamList<T> out;
    a0_.collect("dec.a0", out);
    a1_.collect("dec.a1", out);
    b0_.collect("dec.b0", out);
    b1_.collect("dec.b1", out);
    c0_.collect("dec.c0", out);
    c1_.collect("dec.c1", out);
    c2_.collect("dec.c2", out);
    u1_.collect("dec.u1", out);
    u0_.collect("dec.u0", out);
    out_.collect("dec.out", out);
    return out;
}

template <typename T>
ParamList<T> Tvae<T>::parameters() const {
    auto out = encoder_parameters();
    auto dec = decoder_parameters();
    out.insert(out.end(), dec.begin(), dec.end());
    return out;
}

template <typename T>
TvaePass<T> tvae_forward(const Vae<T>& vae, const Tvae<T>& tvae, const Tensor<T>& raw_rgb,
                         const Tensor<T>& smooth_rgb, const Tensor<T>& alpha) {
    TvaePass<T> pass;
    pass.z = vae.encode(smooth_rgb).mean;
    pass.z_alpha = tvae.encode(raw_rgb, alpha);
    const AdjustedLatent<T> z_adj(pass.z, pass.z_alpha);
    pass.rgb_hat = vae.decode(z_adj.tensor());
    pass.out = tvae.decode(pass.rgb_hat, z_adj);
    return pass;
}

template <typename T>
Tensor<T> loss_identity(const Tensor<T>& target, const Tensor<T>& rgb_hat) {
    if (target.shape() != rgb_hat.shape()) throw ShapeError("identity loss: target and reconstruction shapes differ");
    return scale(sum_squared_error(target, rgb_hat), T(1) / static_cast<T>(target.dim(0)));
}

template <typename T>
Tensor<T> loss_identity(const Tensor<T>& target, const Tensor<T>& z, const Tensor<T>& z_alpha, const Vae<T>& vae) {
    return loss_identity(target, vae.decode(AdjustedLatent<T>(z, z_alpha).tensor()));
}

template <typename T>
Tensor<T> loss_recon(const Tensor<T>& rgb, const Tensor<T>& alpha, const Tensor<T>& rgb_pred,
                     const Tensor<T>& alpha_pred) {
    if (rgb.shape() != rgb_pred.shape() || alpha.shape() != alpha_pred.shape()) {
        throw ShapeError("recon loss: target and prediction shapes differ");
    }
    const T inv_batch = T(1) / static_cast<T>(rgb.dim(0));
    return scale(add(sum_squared_error(rgb, rgb_pred), sum_squared_error(alpha, alpha_pred)), inv_batch);
}

template <typename T>
Tensor<T> loss_tvae(const Tensor<T>& recon, const Tensor<T>& identity, double lambda) {
    if (!(lambda >= 0.0)) throw ConfigError("loss weight lambda must be >= 0, got " + std::to_string(lambda));
    return add(recon, scale(identity, static_cast<T>(lambda)));
}

#define TVDM_INSTANTIATE(T)                                                                                   \
    template class AdjustedLatent<T>;                                                                         \
    template class Tvae<T>;                                                                                   \
    template TvaePass<T> tvae_forward(const Vae<T>&, const Tvae<T>&, const Tensor<T>&, const Tensor<T>&,      \
                                      const Tensor<T>&);                                                      \
    template Tensor<T> loss_identity(const Tensor<T>&, const Tensor<T>&);                                     \
    template Tensor<T> loss_identity(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, const Vae<T>&);    \
    template Tensor<T> loss_recon(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);    \
    template Tensor<T> loss_tvae(const Tensor<T>&, const Tensor<T>&, double);

TVDM_INSTANTIATE(float)
TVDM_INSTANTIATE(double)

}  // namespace tvdm::autoenc
