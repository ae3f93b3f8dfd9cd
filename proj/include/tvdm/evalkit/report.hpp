#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tvdm/amcm/module.hpp"
#include "tvdm/evalkit/metrics.hpp"
#include "tvdm/vdm/pipeline.hpp"

namespace tvdm::evalkit {

inline constexpr const char* kMethodWithoutAmcm = "without-amcm";
inline constexpr const char* kMethodWithAmcm = "with-amcm";
inline constexpr const char* kMethodChromaKey = "chroma-key";
inline constexpr const char* kMethodDirect = "direct";

struct MethodMetrics {
    std::string method;
    bool missing = false;  // the method's checkpoint was not available
    std::size_t videos = 0;
    double alpha_iou = 0.0;
    double psnr_db = 0.0;
    double aer = 0.0;
    double fringe = 0.0;
};

struct MetricsReport {
    std::string dataset;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<MethodMetrics> rows;

    const MethodMetrics* find(const std::string& method) const;
    std::vector<std::string> missing() const;
    // One JSON object per row, metadata repeated on every line.
    std::string jsonl() const;
    // Aligned plain-text table; missing rows show "n/a".
    std::string table() const;
};

// The post-processing baseline: green composite, the RGB-only autoencoder path a vanilla
// latent video model would apply, then chroma keying.
RGBAVideo chroma_key_baseline(const autoenc::Vae<float>& vae, const RGBAVideo& video, const ChromaKeyOptions& options = {});
// Transparent reconstruction through the adjusted latent.
RGBAVideo direct_reconstruction(const vdm::Autoencoders& ae, const RGBAVideo& video);

struct EvalVideo {
    RGBAVideo video;  // ground truth; frame 0 is the conditioned image
    std::string id;
};

struct AblationInputs {
    const vdm::Autoencoders* autoencoders = nullptr;
    const vdm::VideoDiffusion* backbone = nullptr;  // null: generation rows missing
    const amcm::Amcm<float>* amcm = nullptr;        // null: the with-amcm row is missing
    std::vector<EvalVideo> eval;
    std::size_t sampler_steps = 50;
    std::uint64_t seed = 0;  // video i uses seed + i under every method
    double dilation_px = 2.0;
};

// Animates one eval video's first frame under the given method; boxes are the inference boxes.
struct EvalGeneration {
    RGBAVideo video;
    amcm::BoxSequence boxes;
};
EvalGeneration generate_for_eval(const AblationInputs& in, std::size_t index, bool with_amcm);

// Metrics for each requested method over the same eval videos and seeds.
MetricsReport ablation_report(const AblationInputs& in, const std::vector<std::string>& methods,
                              const std::string& dataset, const std::string& config_hash);

}  // namespace tvdm::evalkit
