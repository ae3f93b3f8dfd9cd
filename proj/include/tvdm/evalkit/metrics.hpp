#pragma once

#include <array>
#include <span>
#include <vector>

#include "tvdm/amcm/boxes.hpp"
#include "tvdm/dataio/rgba.hpp"

namespace tvdm::evalkit {

struct RGBImage {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<float> rgb;  // HWC
};

inline constexpr std::array<float, 3> kKeyGreen{0.0f, 1.0f, 0.0f};
inline constexpr std::array<float, 3> kBlack{0.0f, 0.0f, 0.0f};
inline constexpr double kPsnrCap = 99.0;

// Straight-alpha over operator onto a constant background.
RGBImage composite_over(const RGBAImage& image, const std::array<float, 3>& background);
inline RGBImage composite_green(const RGBAImage& image) { return composite_over(image, kKeyGreen); }

struct ChromaKeyOptions {
    double tolerance = 0.35;  // Euclidean RGB distance to the key
    bool feather = false;     // opaque pixels touching a keyed pixel get alpha 0.5
};

// alpha = 0 where the colour is within tolerance of the key green, else 1; rgb passes through.
RGBAImage chroma_key(const RGBImage& image, const ChromaKeyOptions& options = {});

// |A & B| / |A | B| of the masks alpha > threshold; 1 when both are empty.
double alpha_iou(std::span<const float> pred, std::span<const float> truth, double threshold = 0.5);
// Mean per-frame IoU over a video pair.
double alpha_iou(const RGBAVideo& pred, const RGBAVideo& truth, double threshold = 0.5);

// Share of alpha mass outside each frame's box grown by dilation_px; 0 when there is no mass.
double artifact_escape_ratio(const RGBAVideo& video, const amcm::BoxSequence& boxes, double dilation_px = 2.0);

// 10 log10(1 / MSE) for [0, 1] data, capped at kPsnrCap.
double psnr(std::span<const float> pred, std::span<const float> truth);
// PSNR of both videos composited over black.
double composite_psnr(const RGBAVideo& pred, const RGBAVideo& truth);

// Pixels of the mask alpha > 0.5 on either side of its edge (4-neighbour adjacency).
std::vector<bool> boundary_ring(std::span<const float> alpha, std::size_t height, std::size_t width);

struct RingErrors {
    double ring_rate = 0.0;      // mask disagreement rate on the ground-truth boundary ring
    double interior_rate = 0.0;  // disagreement rate everywhere else
    std::size_t ring_pixels = 0;
    std::size_t interior_pixels = 0;
};
RingErrors ring_errors(std::span<const float> pred, std::span<const float> truth, std::size_t height, std::size_t width);

// Alpha-weighted green spill max(0, g - max(r, b)) on the boundary ring of the predicted mask.
double fringe_score(const RGBAImage& image);
double fringe_score(const RGBAVideo& video);

}  // namespace tvdm::evalkit
