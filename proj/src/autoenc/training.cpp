#include "tvdm/autoenc/training.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "tvdm/autoenc/image_tensor.hpp"
#include "tvdm/autoenc/smooth.hpp"
#include "tvdm/numcore/errors.hpp"

namespace tvdm::autoenc {

using namespace numcore;

namespace {

double norm(const Tensor<float>& t) {
    double s = 0.0;
    for (float v : t.data()) s += static_cast<double>(v) * v;
    return std::sqrt(s);
}

template <typename Clock>
double seconds_since(typename Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

RGBAImage over_green(const RGBAImage& image) {
    RGBAImage out = image;
    for (std::size_t p = 0; p < image.pixels(); ++p) {
        const float a = image.alpha[p];
        out.rgb[p * 3 + 0] = a * image.rgb[p * 3 + 0];
        out.rgb[p * 3 + 1] = a * image.rgb[p * 3 + 1] + (1.0f - a);
        out.rgb[p * 3 + 2] = a * image.rgb[p * 3 + 2];
        out.alpha[p] = 1.0f;
    }
    return out;
}

}  // namespace

std::vector<std::size_t> draw_batch(Rng& rng, std::size_t n, std::size_t batch) {
    std::vector<std::size_t> idx(batch);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
    return idx;
}

void check_common(const TrainCommon& c, std::size_t samples) {
    if (samples == 0) throw ConfigError("training set is empty");
    if (c.batch == 0) throw ConfigError("batch must be positive");
    if (!(c.lr > 0.0)) throw ConfigError("lr must be positive");
}

AdamWHyper hyper_for(const TrainCommon& c) {
    AdamWHyper h;
    h.lr = c.lr;
    h.weight_decay = c.weight_decay;
    return h;
}

void write_common_meta(Checkpoint& ckpt, const TrainCommon& c, std::size_t step, std::size_t samples) {
    ckpt.meta["train.step"] = std::to_string(step);
    ckpt.meta["train.steps"] = std::to_string(c.steps);
    ckpt.meta["train.batch"] = std::to_string(c.batch);
    ckpt.meta["train.seed"] = std::to_string(c.seed);
    ckpt.meta["train.samples"] = std::to_string(samples);
    for (const auto& [k, v] : c.meta) ckpt.meta[k] = v;
}

std::vector<RGBAImage> smooth_all(std::span<const RGBAImage> frames) {
    std::vector<RGBAImage> out;
    out.reserve(frames.size());
    for (const auto& f : frames) out.push_back(smooth_rgb(f));
    return out;
}

std::vector<TvaeSample> make_tvae_samples(std::span<const RGBAImage> frames) {
    std::vector<TvaeSample> out;
    out.reserve(frames.size());
    for (const auto& f : frames) out.push_back({f, smooth_rgb(f)});
    return out;
}

void store_vae(Checkpoint& ckpt, const Vae<float>& vae) {
    ckpt.meta["vae.latent_channels"] = std::to_string(vae.config().latent_channels);
    ckpt.meta["vae.base_channels"] = std::to_string(vae.config().base_channels);
    ckpt.meta["vae.mid_channels"] = std::to_string(vae.config().mid_channels);
    store_params(ckpt, vae.parameters(), "vae.");
}

Vae<float> load_vae(const Checkpoint& ckpt) {
    VaeConfig cfg;
    cfg.latent_channels = std::stoul(ckpt.meta_at("vae.latent_channels"));
    cfg.base_channels = std::stoul(ckpt.meta_at("vae.base_channels"));
    cfg.mid_channels = std::stoul(ckpt.meta_at("vae.mid_channels"));
    Rng rng(0);
    Vae<float> vae(cfg, rng);
    load_params(ckpt, vae.parameters(), "vae.");
    return vae;
}

void store_tvae(Checkpoint& ckpt, const Tvae<float>& tvae) {
    const auto& c = tvae.config();
    ckpt.meta["tvae.latent_channels"] = std::to_string(c.latent_channels);
    for (std::size_t i = 0; i < 3; ++i) {
        ckpt.meta["tvae.encoder_channels." + std::to_string(i)] = std::to_string(c.encoder_channels[i]);
        ckpt.meta["tvae.decoder_channels." + std::to_string(i)] = std::to_string(c.decoder_channels[i]);
    }
    store_params(ckpt, tvae.parameters(), "tvae.");
}

Tvae<float> load_tvae(const Checkpoint& ckpt) {
    TvaeConfig cfg;
    cfg.latent_channels = std::stoul(ckpt.meta_at("tvae.latent_channels"));
    for (std::size_t i = 0; i < 3; ++i) {
        cfg.encoder_channels[i] = std::stoul(ckpt.meta_at("tvae.encoder_channels." + std::to_string(i)));
        cfg.decoder_channels[i] = std::stoul(ckpt.meta_at("tvae.decoder_channels." + std::to_string(i)));
    }
    Rng rng(0);
    Tvae<float> tvae(cfg, rng);
    load_params(ckpt, tvae.parameters(), "tvae.");
    return tvae;
}

VaeTrainResult train_vae(std::span<const RGBAImage> smoothed, const VaeTrainConfig& config,
                         const std::optional<std::filesystem::path>& checkpoint_path) {
    const auto& tc = config.train;
    check_common(tc, smoothed.size());
    if (!(config.kl_weight >= 0.0)) throw ConfigError("kl_weight must be >= 0");
    if (!(config.green_fraction >= 0.0 && config.green_fraction <= 1.0)) {
        throw ConfigError("green_fraction must lie in [0, 1]");
    }
    require_latent_divisible(smoothed[0].height, smoothed[0].width);
    Rng rng(tc.seed);
    Rng init_rng = rng.fork();
    VaeTrainResult result{Vae<float>(config.model, init_rng), {}, {}};
    const auto params = result.vae.parameters();
    auto state = make_adamw_state(params, hyper_for(tc));

    auto snapshot = [&](std::size_t step) {
        Checkpoint ckpt;
        ckpt.meta["stage"] = "vae";
        ckpt.meta["vae.kl_weight"] = std::to_string(config.kl_weight);
        ckpt.meta["vae.green_fraction"] = std::to_string(config.green_fraction);
        write_common_meta(ckpt, tc, step, smoothed.size());
        store_vae(ckpt, result.vae);
        store_adamw(ckpt, params, state, "opt.");
        return ckpt;
    };

    const auto start = std::chrono::steady_clock::now();
    std::vector<RGBAImage> batch(tc.batch);
    for (std::size_t step = 1; step <= tc.steps; ++step) {
        for (std::size_t b = 0; const auto i : draw_batch(rng, smoothed.size(), tc.batch)) {
            batch[b++] = config.green_fraction > 0.0 && rng.uniform() < config.green_fraction ? over_green(smoothed[i])
                                                                                               : smoothed[i];
        }
        const auto x = rgb_tensor<float>(batch);
        const auto post = result.vae.encode(x);
        const auto z = sample_posterior(post, rng);
        const auto recon = scale(sum_squared_error(x, result.vae.decode(z)), 1.0f / static_cast<float>(tc.batch));
        const auto loss = add(recon, scale(kl_divergence(post), static_cast<float>(config.kl_weight)));
        zero_grads(params);
        loss.backward();
        adamw_step(params, state);
        result.history.loss.push_back(loss.item());
        if (tc.log && tc.log_every && step % tc.log_every == 0) {
            *tc.log << "vae step " << step << "/" << tc.steps << " loss " << loss.item() << " recon " << recon.item()
                    << " (" << seconds_since<std::chrono::steady_clock>(start) << " s)" << std::endl;
        }
        if (checkpoint_path && tc.checkpoint_every && step % tc.checkpoint_every == 0 && step < tc.steps) {
            snapshot(step).save(*checkpoint_path);
        }
    }
    zero_grads(params);
    result.checkpoint = snapshot(tc.steps);
    if (checkpoint_path) result.checkpoint.save(*checkpoint_path);
    return result;
}

TvaeTrainResult train_tvae(const Vae<float>& frozen_vae, std::span<const TvaeSample> samples,
                           const TvaeTrainConfig& config, const std::optional<std::filesystem::path>& checkpoint_path) {
    const auto& tc = config.train;
    check_common(tc, samples.size());
    if (!(config.lambda >= 0.0)) throw ConfigError("lambda must be >= 0, got " + std::to_string(config.lambda));
    if (config.model.latent_channels != frozen_vae.config().latent_channels) {
        throw ConfigError("TVAE latent channels (" + std::to_string(config.model.latent_channels) +
                          ") differ from the VAE's (" + std::to_string(frozen_vae.config().latent_channels) + ")");
    }
    const auto vae_params = frozen_vae.parameters();
    set_trainable(vae_params, false);
    zero_grads(vae_params);

    Rng rng(tc.seed);
    Rng init_rng = rng.fork();
    TvaeTrainResult result{Tvae<float>(config.model, init_rng), {}, {}};
    const auto params = result.tvae.parameters();
    auto state = make_adamw_state(params, hyper_for(tc));

    auto snapshot = [&](std::size_t step) {
        Checkpoint ckpt;
        ckpt.meta["stage"] = "tvae";
        ckpt.meta["tvae.lambda"] = std::to_string(config.lambda);
        ckpt.meta["tvae.opaque_fraction"] = std::to_string(config.opaque_fraction);
        write_common_meta(ckpt, tc, step, samples.size());
        store_tvae(ckpt, result.tvae);
        store_adamw(ckpt, params, state, "opt.");
        return ckpt;
    };

    const auto start = std::chrono::steady_clock::now();
    std::vector<RGBAImage> raw(tc.batch), smooth(tc.batch);
    for (std::size_t step = 1; step <= tc.steps; ++step) {
        for (std::size_t b = 0; const auto i : draw_batch(rng, samples.size(), tc.batch)) {
            if (rng.uniform() < config.opaque_fraction) {
                RGBAImage opaque = samples[i].smooth;
                std::fill(opaque.alpha.begin(), opaque.alpha.end(), 1.0f);
                raw[b] = opaque;
                smooth[b] = std::move(opaque);
            } else {
                raw[b] = samples[i].raw;
                smooth[b] = samples[i].smooth;
            }
            ++b;
        }
        const auto x_raw = rgb_tensor<float>(raw), x_smooth = rgb_tensor<float>(smooth);
        const auto a = alpha_tensor<float>(raw);
        const auto pass = tvae_forward(frozen_vae, result.tvae, x_raw, x_smooth, a);
        const auto recon = loss_recon(x_smooth, a, pass.out.rgb, pass.out.alpha);
        const auto identity = loss_identity(x_smooth, pass.rgb_hat);
        const auto loss = loss_tvae(recon, identity, config.lambda);
        zero_grads(params);
        loss.backward();
        if (config.check_frozen && max_abs_grad(vae_params) != 0.0) {
            throw NumericError("stage 1: a frozen VAE parameter received a gradient at step " + std::to_string(step));
        }
        adamw_step(params, state);
        result.history.loss.push_back(loss.item());
        result.history.perturbation_ratio.push_back(norm(pass.z_alpha) / std::max(1e-12, norm(pass.z)));
        if (tc.log && tc.log_every && step % tc.log_every == 0) {
            *tc.log << "tvae step " << step << "/" << tc.steps << " loss " << loss.item() << " recon " << recon.item()
                    << " identity " << identity.item() << " |z_a|/|z| " << result.history.perturbation_ratio.back()
                    << " (" << seconds_since<std::chrono::steady_clock>(start) << " s)" << std::endl;
        }
        if (checkpoint_path && tc.checkpoint_every && step % tc.checkpoint_every == 0 && step < tc.steps) {
            snapshot(step).save(*checkpoint_path);
        }
    }
    zero_grads(params);
    result.checkpoint = snapshot(tc.steps);
    if (checkpoint_path) result.checkpoint.save(*checkpoint_path);
    return result;
}

double windowed_trend(const std::vector<double>& values, std::size_t window) {
    if (window == 0 || values.size() < window) throw ConfigError("windowed_trend: fewer values than the window");
    const double first = std::accumulate(values.begin(), values.begin() + window, 0.0) / window;
    const double last = std::accumulate(values.end() - window, values.end(), 0.0) / window;
    return last - first;
}

}  // namespace tvdm::autoenc
