#include "tvdm/vdm/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "tvdm/autoenc/image_tensor.hpp"
#include "tvdm/autoenc/smooth.hpp"
#include "tvdm/numcore/errors.hpp"

namespace tvdm::vdm {

using namespace numcore;

Tensor<float> encode_adjusted(const Autoencoders& ae, const RGBAVideo& video) {
    video.validate();
    NoGradGuard no_grad;
    std::vector<RGBAImage> smooth;
    for (const auto& f : video.frames) smooth.push_back(autoenc::smooth_rgb(f));
    const auto z = ae.vae.encode(autoenc::rgb_tensor<float>(smooth)).mean;
    const auto z_alpha = ae.tvae.encode(autoenc::rgb_tensor<float>(video.frames), autoenc::alpha_tensor<float>(video.frames));
    return autoenc::AdjustedLatent<float>(z, z_alpha).tensor();
}

RGBAVideo decode_adjusted(const Autoencoders& ae, const Tensor<float>& latents) {
    NoGradGuard no_grad;
    // The sampled latent is already an adjusted latent; wrap it with a zero perturbation.
    const autoenc::AdjustedLatent<float> z_adj(latents, Tensor<float>::zeros(latents.shape()));
    const auto rgb_hat = ae.vae.decode(z_adj.tensor());
    const auto out = ae.tvae.decode(rgb_hat, z_adj);
    RGBAVideo video;
    video.frames = autoenc::to_images(out.rgb, out.alpha);
    return video;
}

LatentDataset encode_dataset(const Autoencoders& ae, std::span<const RGBAVideo> videos,
                             std::span<const std::vector<float>> boxes) {
    if (boxes.size() != videos.size()) throw ShapeError("encode_dataset: one box sequence per video required");
    LatentDataset data;
    data.latents.resize(videos.size());
    parallel_for(videos.size(), [&](std::size_t i) { data.latents[i] = encode_adjusted(ae, videos[i]); });
    for (std::size_t i = 0; i < videos.size(); ++i) {
        if (boxes[i].size() != 4 * videos[i].frames.size()) throw ShapeError("encode_dataset: box rows do not match frames");
        data.captions.push_back(videos[i].caption);
        data.boxes.push_back(boxes[i]);
    }
    return data;
}

double measure_latent_scale(const LatentDataset& data) {
    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    for (const auto& z : data.latents) {
        for (float v : z.data()) {
            sum += v;
            sq += static_cast<double>(v) * v;
            ++n;
        }
    }
    if (n == 0) throw ConfigError("cannot measure the latent scale of an empty dataset");
    const double mean = sum / n, var = sq / n - mean * mean;
    if (!(var > 0.0)) throw NumericError("latents have zero variance");
    return 1.0 / std::sqrt(var);
}

LatentBatch make_batch(const LatentDataset& data, std::span<const std::size_t> items, double latent_scale) {
    if (items.empty()) throw ConfigError("empty batch");
    const Shape one = data.latents.at(items[0]).shape();
    const std::size_t per = numel(one), frame = per / one[0];
    std::vector<float> z(items.size() * per), cond(items.size() * frame), boxes;
    LatentBatch batch;
    for (std::size_t b = 0; b < items.size(); ++b) {
        const auto& src = data.latents.at(items[b]);
        if (src.shape() != one) throw ShapeError("latent dataset mixes shapes " + shape_str(one) + " and " + shape_str(src.shape()));
        for (std::size_t k = 0; k < per; ++k) z[b * per + k] = static_cast<float>(src.data()[k] * latent_scale);
        std::copy(z.begin() + b * per, z.begin() + b * per + frame, cond.begin() + b * frame);
        batch.captions.push_back(data.captions.at(items[b]));
        boxes.insert(boxes.end(), data.boxes.at(items[b]).begin(), data.boxes.at(items[b]).end());
    }
    Shape zshape{items.size()};
    zshape.insert(zshape.end(), one.begin(), one.end());
    batch.z0 = Tensor<float>(zshape, std::move(z));
    batch.cond = Tensor<float>({items.size(), one[1], one[2], one[3]}, std::move(cond));
    batch.boxes = Tensor<float>({items.size(), one[0], 4}, std::move(boxes));
    return batch;
}

EpsModel<float> conditioned_model(const UNet<float>& unet, const Tensor<float>& cond, const Tensor<float>& text,
                                  const MotionHook<float>* hook) {
    return [&unet, cond, text, hook](const Tensor<float>& z_t, const std::vector<std::size_t>& t) {
        return unet.forward(z_t, t, cond, text, hook);
    };
}

void store_vdm(Checkpoint& ckpt, const VideoDiffusion& model) {
    const auto& c = model.unet.config();
    ckpt.meta["vdm.frames"] = std::to_string(c.frames);
    ckpt.meta["vdm.latent_channels"] = std::to_string(c.latent_channels);
    ckpt.meta["vdm.base_channels"] = std::to_string(c.base_channels);
    ckpt.meta["vdm.groups"] = std::to_string(c.groups);
    ckpt.meta["vdm.time_dim"] = std::to_string(c.time_dim);
    ckpt.meta["vdm.timesteps"] = std::to_string(c.timesteps);
    ckpt.meta["vdm.sampler_steps"] = std::to_string(c.sampler_steps);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", model.latent_scale);
    ckpt.meta["vdm.latent_scale"] = buf;
    std::string betas;
    for (double b : model.schedule.beta) {
        std::snprintf(buf, sizeof buf, "%.17g", b);
        if (!betas.empty()) betas += ' ';
        betas += buf;
    }
    ckpt.meta["vdm.betas"] = betas;
    store_params(ckpt, model.unet.parameters(), "unet.");
}

VideoDiffusion load_vdm(const Checkpoint& ckpt) {
    VdmConfig c;
    c.frames = std::stoul(ckpt.meta_at("vdm.frames"));
    c.latent_channels = std::stoul(ckpt.meta_at("vdm.latent_channels"));
    c.base_channels = std::stoul(ckpt.meta_at("vdm.base_channels"));
    c.groups = std::stoul(ckpt.meta_at("vdm.groups"));
    c.time_dim = std::stoul(ckpt.meta_at("vdm.time_dim"));
    c.timesteps = std::stoul(ckpt.meta_at("vdm.timesteps"));
    c.sampler_steps = std::stoul(ckpt.meta_at("vdm.sampler_steps"));
    std::vector<double> betas;
    std::istringstream in(ckpt.meta_at("vdm.betas"));
    for (double b; in >> b;) betas.push_back(b);
    Rng rng(0);
    VideoDiffusion model{UNet<float>(c, rng), make_noise_schedule(std::move(betas)),
                         std::stod(ckpt.meta_at("vdm.latent_scale"))};
    load_params(ckpt, model.unet.parameters(), "unet.");
    return model;
}

VdmTrainResult train_vdm(const LatentDataset& data, const VdmTrainConfig& config,
                         const std::optional<std::filesystem::path>& checkpoint_path) {
    const auto& tc = config.train;
    autoenc::check_common(tc, data.size());
    const auto& shape = data.latents[0].shape();
    if (shape[0] != config.model.frames || shape[1] != config.model.latent_channels) {
        throw ConfigError("latents " + shape_str(shape) + " do not match the configured " +
                          std::to_string(config.model.frames) + " frames x " + std::to_string(config.model.latent_channels) +
                          " channels");
    }
    Rng rng(tc.seed);
    Rng init_rng = rng.fork();
    VdmTrainResult result{{UNet<float>(config.model, init_rng),
                           make_linear_schedule(config.model.timesteps, config.beta_start, config.beta_end),
                           measure_latent_scale(data)},
                          {},
                          {}};
    const auto params = result.model.unet.parameters();
    auto state = make_adamw_state(params, autoenc::hyper_for(tc));

    auto snapshot = [&](std::size_t step) {
        Checkpoint ckpt;
        ckpt.meta["stage"] = "vdm";
        autoenc::write_common_meta(ckpt, tc, step, data.size());
        store_vdm(ckpt, result.model);
        store_adamw(ckpt, params, state, "opt.");
        return ckpt;
    };

    const auto start = std::chrono::steady_clock::now();
    for (std::size_t step = 1; step <= tc.steps; ++step) {
        const auto items = autoenc::draw_batch(rng, data.size(), tc.batch);
        const auto batch = make_batch(data, items, result.model.latent_scale);
        const auto text = result.model.unet.text(batch.captions);
        const auto loss = loss_eps(conditioned_model(result.model.unet, batch.cond, text, nullptr), batch.z0,
                                   result.model.schedule, rng);
        zero_grads(params);
        loss.backward();
        adamw_step(params, state);
        result.history.loss.push_back(loss.item());
        if (tc.log && tc.log_every && step % tc.log_every == 0) {
            *tc.log << "vdm step " << step << "/" << tc.steps << " loss " << loss.item() << " ("
                    << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << " s)" << std::endl;
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

Generated generate_video(const Autoencoders& ae, const VideoDiffusion& model, const RGBAImage& cond_image,
                         const std::string& prompt, const MotionHook<float>* hook, const GenerateOptions& options) {
    RGBAVideo single;
    single.frames = {cond_image};
    NoGradGuard no_grad;
    const auto cond_latent = encode_adjusted(ae, single);  // [1, c, h, w]
    const std::vector<float> scaled_cond = [&] {
        std::vector<float> v(cond_latent.data().begin(), cond_latent.data().end());
        for (auto& x : v) x = static_cast<float>(x * model.latent_scale);
        return v;
    }();
    const auto cond = Tensor<float>(cond_latent.shape(), scaled_cond);
    const auto text = model.unet.text({prompt});
    const auto& cfg = model.unet.config();
    const Shape shape{1, cfg.frames, cfg.latent_channels, cond.dim(2), cond.dim(3)};
    Rng rng(options.seed);
    const auto z = ddim_sample(conditioned_model(model.unet, cond, text, hook), shape, model.schedule, options.steps, rng);
    std::vector<float> unscaled(z.data().begin(), z.data().end());
    for (auto& x : unscaled) x = static_cast<float>(x / model.latent_scale);
    Generated out;
    out.latents = Tensor<float>({cfg.frames, cfg.latent_channels, cond.dim(2), cond.dim(3)}, std::move(unscaled));
    out.video = decode_adjusted(ae, out.latents);
    out.video.caption = prompt;
    return out;
}

std::size_t worker_threads() {
    if (const char* env = std::getenv("TVDM_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<std::size_t>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min(worker_threads(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::mutex mu;
    std::size_t next = 0;
    std::exception_ptr failure;
    auto run = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard lock(mu);
                if (next >= count || failure) return;
                i = next++;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace tvdm::vdm
