#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "tvdm/autoenc/tvae.hpp"
#include "tvdm/dataio/rgba.hpp"
#include "tvdm/numcore/adamw.hpp"
#include "tvdm/numcore/checkpoint.hpp"

namespace tvdm::autoenc {

struct TrainCommon {
    std::size_t steps = 1000;
    std::size_t batch = 8;
    double lr = 1e-3;
    double weight_decay = 0.0;
    std::uint64_t seed = 0;
    std::size_t checkpoint_every = 0;  // 0: only the final checkpoint
    std::size_t log_every = 100;
    std::ostream* log = nullptr;
    std::map<std::string, std::string> meta;  // copied into every checkpoint, e.g. the run's config hash
};

// Shared by every training loop.
std::vector<std::size_t> draw_batch(numcore::Rng& rng, std::size_t n, std::size_t batch);
void check_common(const TrainCommon& c, std::size_t samples);
numcore::AdamWHyper hyper_for(const TrainCommon& c);
void write_common_meta(numcore::Checkpoint& ckpt, const TrainCommon& c, std::size_t step, std::size_t samples);

// Stage 0: the vanilla VAE, trained from scratch on smoothed RGB frames.
struct VaeTrainConfig {
    VaeConfig model;
    TrainCommon train;
    double kl_weight = 1e-6;
    // Share of samples replaced by their composite over key green (0, 1, 0), so the RGB-only
    // path can carry green-screen frames.
    double green_fraction = 0.25;
};

// Stage 1: the TVAE against a frozen VAE.
struct TvaeTrainConfig {
    TvaeConfig model;
    TrainCommon train;
    double lambda = 1.0;
    // Share of samples replaced by a fully opaque copy (alpha = 1), so opaque inputs decode opaque.
    double opaque_fraction = 0.1;
    // Verifies after every backward pass that no frozen VAE parameter received a gradient.
    bool check_frozen = false;
};

struct TrainHistory {
    std::vector<double> loss;  // per step
    std::vector<double> perturbation_ratio;  // stage 1: ||z_alpha|| / ||z|| per step
};

// One stage-1 training item: the raw frame and its smoothed RGB (alpha is shared).
struct TvaeSample {
    RGBAImage raw;
    RGBAImage smooth;
};

std::vector<TvaeSample> make_tvae_samples(std::span<const RGBAImage> frames);
// Smoothed copies, as the VAE sees them.
std::vector<RGBAImage> smooth_all(std::span<const RGBAImage> frames);

struct VaeTrainResult {
    Vae<float> vae;
    TrainHistory history;
    numcore::Checkpoint checkpoint;
};

// checkpoint_path, when given, receives the final checkpoint and one every checkpoint_every steps.
VaeTrainResult train_vae(std::span<const RGBAImage> smoothed, const VaeTrainConfig& config,
                         const std::optional<std::filesystem::path>& checkpoint_path = std::nullopt);

struct TvaeTrainResult {
    Tvae<float> tvae;
    TrainHistory history;
    numcore::Checkpoint checkpoint;
};

TvaeTrainResult train_tvae(const Vae<float>& frozen_vae, std::span<const TvaeSample> samples,
                           const TvaeTrainConfig& config,
                           const std::optional<std::filesystem::path>& checkpoint_path = std::nullopt);

// Model checkpoints carry their architecture in the metadata.
void store_vae(numcore::Checkpoint& ckpt, const Vae<float>& vae);
Vae<float> load_vae(const numcore::Checkpoint& ckpt);
void store_tvae(numcore::Checkpoint& ckpt, const Tvae<float>& tvae);
Tvae<float> load_tvae(const numcore::Checkpoint& ckpt);

// Mean of the last `window` entries minus the mean of the first `window` entries.
double windowed_trend(const std::vector<double>& values, std::size_t window);

}  // namespace tvdm::autoenc
