#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tvdm/autoenc/training.hpp"
#include "tvdm/dataio/rgba.hpp"
#include "tvdm/vdm/diffusion.hpp"
#include "tvdm/vdm/unet.hpp"

namespace tvdm::vdm {

// The frozen autoencoder pair that maps RGBA frames to adjusted latents and back.
struct Autoencoders {
    autoenc::Vae<float> vae;
    autoenc::Tvae<float> tvae;
};

// z + z_alpha for every frame: [N, c, H/8, W/8].
Tensor<float> encode_adjusted(const Autoencoders& ae, const RGBAVideo& video);
// Adjusted latents [N, c, h, w] back to straight-alpha RGBA frames.
RGBAVideo decode_adjusted(const Autoencoders& ae, const Tensor<float>& latents);

// Training videos in latent form (unscaled adjusted latents).
struct LatentDataset {
    std::vector<Tensor<float>> latents;  // each [N, c, h, w]
    std::vector<std::string> captions;
    std::vector<std::vector<float>> boxes;  // each N x 4 normalized corners, row-major
    std::size_t size() const { return latents.size(); }
};

LatentDataset encode_dataset(const Autoencoders& ae, std::span<const RGBAVideo> videos,
                             std::span<const std::vector<float>> boxes);

// 1 / standard deviation over every latent element.
double measure_latent_scale(const LatentDataset& data);

// [B, N, c, h, w] batch of scaled latents plus conditioning for the given items.
struct LatentBatch {
    Tensor<float> z0;
    Tensor<float> cond;  // frame 0 of each item, [B, c, h, w]
    std::vector<std::string> captions;
    Tensor<float> boxes;  // [B, N, 4]
};
LatentBatch make_batch(const LatentDataset& data, std::span<const std::size_t> items, double latent_scale);

struct VideoDiffusion {
    UNet<float> unet;
    NoiseSchedule schedule;
    double latent_scale = 1.0;
};

// Predicts eps for z_t under the given conditioning; hook may be null.
EpsModel<float> conditioned_model(const UNet<float>& unet, const Tensor<float>& cond, const Tensor<float>& text,
                                  const MotionHook<float>* hook);

struct VdmTrainConfig {
    VdmConfig model;
    autoenc::TrainCommon train;
    double beta_start = 1e-4;
    double beta_end = 2e-2;
};

struct VdmTrainResult {
    VideoDiffusion model;
    autoenc::TrainHistory history;
    numcore::Checkpoint checkpoint;
};

// Backbone pretraining on adjusted latents, boxes unused.
VdmTrainResult train_vdm(const LatentDataset& data, const VdmTrainConfig& config,
                         const std::optional<std::filesystem::path>& checkpoint_path = std::nullopt);

void store_vdm(numcore::Checkpoint& ckpt, const VideoDiffusion& model);
VideoDiffusion load_vdm(const numcore::Checkpoint& ckpt);

struct GenerateOptions {
    std::size_t steps = 50;
    std::uint64_t seed = 0;
};

// Animates one conditioned image: encode, sample N frames, decode. The latents are returned too.
struct Generated {
    RGBAVideo video;
    Tensor<float> latents;  // unscaled adjusted latents [N, c, h, w]
};
Generated generate_video(const Autoencoders& ae, const VideoDiffusion& model, const RGBAImage& cond_image,
                         const std::string& prompt, const MotionHook<float>* hook, const GenerateOptions& options);

// Worker count for per-video parallel loops: TVDM_THREADS when set, else the hardware count.
std::size_t worker_threads();
// Runs fn(i) for i in [0, count) on up to worker_threads() threads; rethrows the first failure.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace tvdm::vdm
