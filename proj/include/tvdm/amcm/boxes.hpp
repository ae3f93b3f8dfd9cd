#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tvdm::amcm {

// Foreground threshold: a pixel belongs to the sprite when alpha > 1/255.
inline constexpr float kDefaultAlphaThreshold = 1.0f / 255.0f;

// Inclusive pixel-index box.
struct PixelBox {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;

    bool operator==(const PixelBox&) const = default;
};

struct NormalizedBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    bool operator==(const NormalizedBox&) const = default;
};

// One row per frame. Invalid (empty-foreground) rows are all zero.
struct BoxSequence {
    std::vector<NormalizedBox> boxes;
    std::vector<bool> valid;

    std::size_t size() const { return boxes.size(); }
    // Row-major N x 4 values in (x_min, y_min, x_max, y_max) order.
    std::vector<float> flat() const;
};

// Tight box over {alpha > threshold}; all components merge into one box. nullopt when empty.
std::optional<PixelBox> extract_bbox(const std::vector<float>& alpha, std::size_t height, std::size_t width,
                                     float threshold = kDefaultAlphaThreshold);

// Pixel index i maps to i / (W - 1) horizontally (i / (H - 1) vertically), so the full frame maps
// to (0, 0, 1, 1). Throws ShapeError for boxes outside the frame or inverted corners.
NormalizedBox normalize_box(const PixelBox& box, std::size_t height, std::size_t width);
PixelBox denormalize_box(const NormalizedBox& box, std::size_t height, std::size_t width);

// Per-frame boxes in, BoxSequence out; nullopt entries become invalid rows.
BoxSequence normalize_boxes(const std::vector<std::optional<PixelBox>>& boxes, std::size_t height, std::size_t width);

// Throws ConfigError if any value is outside [0, 1] or a valid row has inverted corners.
void validate_boxes(const BoxSequence& boxes);

struct InferenceBoxes {
    BoxSequence boxes;
    std::optional<std::string> warning;
};

// The conditioned frame's box repeated for every frame, or the validated override when given.
// Empty conditioned alpha falls back to the full frame with a warning.
InferenceBoxes inference_boxes(const std::vector<float>& cond_alpha, std::size_t height, std::size_t width,
                               std::size_t frames, const std::optional<BoxSequence>& override_boxes = std::nullopt,
                               float threshold = kDefaultAlphaThreshold);

// Plain-text rows "i x_min y_min x_max y_max"; invalid rows are written as zeros.
void write_box_file(const std::filesystem::path& path, const BoxSequence& boxes);
BoxSequence read_box_file(const std::filesystem::path& path);

}  // namespace tvdm::amcm
