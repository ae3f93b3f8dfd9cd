#include "tvdm/amcm/module.hpp"

#include <chrono>
#include <sstream>

#include "tvdm/numcore/errors.hpp"
#include "tvdm/numcore/ops.hpp"

namespace tvdm::amcm {

using namespace numcore;

template <typename T>
AmcmBlock<T>::AmcmBlock(std::size_t channels, Rng& rng)
    : channels_(channels),
      fc1_(channels + 4, channels, rng),
      fc2_(channels, channels, rng),
      norm_(channels),
      attn_(channels, channels, channels, rng),
      out_(channels, channels, rng, /*zero_init=*/true) {}

template <typename T>
Tensor<T> AmcmBlock<T>::operator()(const Tensor<T>& features, const Tensor<T>& boxes, std::size_t frames) const {
    if (features.rank() != 4 || features.dim(1) != channels_) {
        throw ShapeError("amcm: features " + shape_str(features.shape()) + " do not have " + std::to_string(channels_) +
                         " channels");
    }
    const std::size_t h = features.dim(2), w = features.dim(3), sites = h * w;
    if (boxes.rank() != 3 || boxes.dim(1) != frames || boxes.dim(2) != 4 || boxes.dim(0) * frames != features.dim(0)) {
        throw ShapeError("amcm: boxes " + shape_str(boxes.shape()) + " do not match " + std::to_string(frames) +
                         " frames of features " + shape_str(features.shape()));
    }
    const auto tokens = vdm::to_temporal_tokens(features, frames);  // [B*h*w, N, C]
    const std::size_t B = boxes.dim(0), row = frames * 4;
    // Broadcast each video's box rows over its sites: [B, N*4] -> [B*h*w, N, 4], kept in the graph.
    const auto spread = add_channel_broadcast(Tensor<T>::zeros({B, row, sites, 1}), reshape(boxes, {B, row}));
    const auto box_tokens = reshape(permute(spread, {0, 2, 3, 1}), {B * sites, frames, 4});
    auto x = fc2_(silu(fc1_(concat<T>({tokens, box_tokens}, 2))));
    const auto a = add(norm_(x), vdm::frame_positions<T>(B * sites, frames, channels_));
    x = add(x, attn_(a, a));
    return vdm::from_temporal_tokens(add(tokens, out_(x)), frames, h, w);
}

template <typename T>
void AmcmBlock<T>::collect(const std::string& prefix, ParamList<T>& out) const {
    fc1_.collect(prefix + ".fc1", out);
    fc2_.collect(prefix + ".fc2", out);
    norm_.collect(prefix + ".norm", out);
    attn_.collect(prefix + ".attn", out);
    out_.collect(prefix + ".out", out);
}

template <typename T>
Amcm<T>::Amcm(const std::vector<std::size_t>& block_channels, Rng& rng) {
    for (std::size_t c : block_channels) blocks_.emplace_back(c, rng);
}

template <typename T>
Amcm<T> Amcm<T>::for_unet(const vdm::UNet<T>& unet, Rng& rng) {
    const auto c = unet.block_channels();
    return Amcm(std::vector<std::size_t>(c.begin(), c.end()), rng);
}

template <typename T>
std::vector<std::size_t> Amcm<T>::block_channels() const {
    std::vector<std::size_t> out;
    for (const auto& b : blocks_) out.push_back(b.channels());
    return out;
}

template <typename T>
ParamList<T> Amcm<T>::parameters() const {
    ParamList<T> out;
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i].collect("block" + std::to_string(i), out);
    return out;
}

template <typename T>
BoxConstraint<T>::BoxConstraint(const Amcm<T>& amcm, Tensor<T> boxes) : amcm_(&amcm), boxes_(std::move(boxes)) {}

template <typename T>
Tensor<T> BoxConstraint<T>::apply(std::size_t block, const Tensor<T>& features, std::size_t frames) const {
    if (block >= amcm_->size()) {
        throw ConfigError("amcm has " + std::to_string(amcm_->size()) + " blocks, backbone asked for block " +
                          std::to_string(block));
    }
    return amcm_->block(block)(features, boxes_, frames);
}

template class AmcmBlock<float>;
template class AmcmBlock<double>;
template class Amcm<float>;
template class Amcm<double>;
template class BoxConstraint<float>;
template class BoxConstraint<double>;

Tensor<float> box_tensor(const BoxSequence& seq) {
    validate_boxes(seq);
    std::vector<float> flat;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const auto b = seq.valid[i] ? seq.boxes[i] : NormalizedBox{};
        for (double v : {b.x_min, b.y_min, b.x_max, b.y_max}) flat.push_back(static_cast<float>(v));
    }
    return Tensor<float>({1, seq.size(), 4}, std::move(flat));
}

void store_amcm(Checkpoint& ckpt, const Amcm<float>& amcm) {
    std::string channels;
    for (std::size_t c : amcm.block_channels()) channels += (channels.empty() ? "" : " ") + std::to_string(c);
    ckpt.meta["amcm.block_channels"] = channels;
    store_params(ckpt, amcm.parameters(), "amcm.");
}

Amcm<float> load_amcm(const Checkpoint& ckpt) {
    std::vector<std::size_t> channels;
    std::istringstream in(ckpt.meta_at("amcm.block_channels"));
    for (std::size_t c; in >> c;) channels.push_back(c);
    Rng rng(0);
    Amcm<float> amcm(channels, rng);
    load_params(ckpt, amcm.parameters(), "amcm.");
    return amcm;
}

AmcmTrainResult train_amcm(const vdm::VideoDiffusion& backbone, const vdm::LatentDataset& data,
                           const AmcmTrainConfig& config, const std::optional<std::filesystem::path>& checkpoint_path) {
    const auto& tc = config.train;
    autoenc::check_common(tc, data.size());
    const auto backbone_params = backbone.unet.parameters();
    set_trainable(backbone_params, false);
    zero_grads(backbone_params);

    Rng rng(tc.seed);
    Rng init_rng = rng.fork();
    AmcmTrainResult result{Amcm<float>::for_unet(backbone.unet, init_rng), {}, {}};
    const auto params = result.amcm.parameters();
    auto state = make_adamw_state(params, autoenc::hyper_for(tc));

    auto snapshot = [&](std::size_t step) {
        Checkpoint ckpt;
        ckpt.meta["stage"] = "amcm";
        autoenc::write_common_meta(ckpt, tc, step, data.size());
        store_amcm(ckpt, result.amcm);
        store_adamw(ckpt, params, state, "opt.");
        return ckpt;
    };

    const auto start = std::chrono::steady_clock::now();
    for (std::size_t step = 1; step <= tc.steps; ++step) {
        const auto items = autoenc::draw_batch(rng, data.size(), tc.batch);
        const auto batch = vdm::make_batch(data, items, backbone.latent_scale);
        Tensor<float> text;
        {
            NoGradGuard no_grad;
            text = backbone.unet.text(batch.captions);
        }
        const BoxConstraint<float> hook(result.amcm, batch.boxes);
        const auto loss =
            vdm::loss_eps(vdm::conditioned_model(backbone.unet, batch.cond, text, &hook), batch.z0, backbone.schedule, rng);
        zero_grads(params);
        loss.backward();
        if (config.check_frozen && max_abs_grad(backbone_params) != 0.0) {
            throw NumericError("stage 2: a frozen backbone parameter received a gradient at step " + std::to_string(step));
        }
        adamw_step(params, state);
        result.history.loss.push_back(loss.item());
        if (tc.log && tc.log_every && step % tc.log_every == 0) {
            *tc.log << "amcm step " << step << "/" << tc.steps << " loss " << loss.item() << " ("
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

}  // namespace tvdm::amcm
