#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "tvdm/amcm/boxes.hpp"
#include "tvdm/vdm/pipeline.hpp"

namespace tvdm::amcm {

using numcore::ParamList;
using numcore::Rng;
using numcore::Tensor;

// Box fusion for one U-Net block: the per-frame box is broadcast over every site and
// concatenated to the features, projected back to C by an FC stack, mixed across frames by
// temporal attention, and added back through a zero-initialized projection.
template <typename T>
class AmcmBlock {
public:
    AmcmBlock() = default;
    AmcmBlock(std::size_t channels, Rng& rng);

    // features [B*N, C, h, w], boxes [B, N, 4] -> [B*N, C, h, w]
    Tensor<T> operator()(const Tensor<T>& features, const Tensor<T>& boxes, std::size_t frames) const;
    void collect(const std::string& prefix, ParamList<T>& out) const;
    std::size_t channels() const { return channels_; }

private:
    std::size_t channels_ = 0;
    numcore::Linear<T> fc1_, fc2_;
    numcore::LayerNorm<T> norm_;
    vdm::Attention<T> attn_;
    numcore::Linear<T> out_;
};

// One block per U-Net block that has a temporal transformer.
template <typename T>
class Amcm {
public:
    Amcm() = default;
    Amcm(const std::vector<std::size_t>& block_channels, Rng& rng);
    static Amcm for_unet(const vdm::UNet<T>& unet, Rng& rng);

    std::size_t size() const { return blocks_.size(); }
    const AmcmBlock<T>& block(std::size_t i) const { return blocks_.at(i); }
    std::vector<std::size_t> block_channels() const;
    ParamList<T> parameters() const;

private:
    std::vector<AmcmBlock<T>> blocks_;
};

// Binds a box batch to the module so the backbone can call it between its transformers.
template <typename T>
class BoxConstraint : public vdm::MotionHook<T> {
public:
    // boxes [B, N, 4]
    BoxConstraint(const Amcm<T>& amcm, Tensor<T> boxes);
    Tensor<T> apply(std::size_t block, const Tensor<T>& features, std::size_t frames) const override;

private:
    const Amcm<T>* amcm_;
    Tensor<T> boxes_;
};

// [1, N, 4] tensor of one box sequence; invalid rows stay all-zero.
Tensor<float> box_tensor(const BoxSequence& seq);

struct AmcmTrainConfig {
    autoenc::TrainCommon train;
    // Verify after every backward pass that no backbone parameter received gradient.
    bool check_frozen = true;
};

struct AmcmTrainResult {
    Amcm<float> amcm;
    autoenc::TrainHistory history;
    numcore::Checkpoint checkpoint;
};

// Stage 2: the noise-prediction objective through the frozen backbone, boxes from ground truth.
AmcmTrainResult train_amcm(const vdm::VideoDiffusion& backbone, const vdm::LatentDataset& data,
                           const AmcmTrainConfig& config,
                           const std::optional<std::filesystem::path>& checkpoint_path = std::nullopt);

void store_amcm(numcore::Checkpoint& ckpt, const Amcm<float>& amcm);
Amcm<float> load_amcm(const numcore::Checkpoint& ckpt);

}  // namespace tvdm::amcm
