#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace tvdm {

// Straight (non-premultiplied) RGBA raster. rgb is interleaved H*W*3, alpha is H*W, row-major.
struct RGBAImage {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<float> rgb;
    std::vector<float> alpha;

    RGBAImage() = default;
    RGBAImage(std::size_t h, std::size_t w) : height(h), width(w), rgb(h * w * 3, 0.0f), alpha(h * w, 0.0f) {}

    std::size_t pixels() const { return height * width; }
    float& channel(std::size_t y, std::size_t x, std::size_t c) { return rgb[(y * width + x) * 3 + c]; }
    float channel(std::size_t y, std::size_t x, std::size_t c) const { return rgb[(y * width + x) * 3 + c]; }
    float& a(std::size_t y, std::size_t x) { return alpha[y * width + x]; }
    float a(std::size_t y, std::size_t x) const { return alpha[y * width + x]; }

    // Throws ShapeError on inconsistent buffers, ConfigError on values outside [0, 1].
    void validate() const;
};

struct RGBAVideo {
    std::vector<RGBAImage> frames;
    int fps = 8;
    std::string caption;

    std::size_t height() const { return frames.empty() ? 0 : frames.front().height; }
    std::size_t width() const { return frames.empty() ? 0 : frames.front().width; }
    // Non-empty, equal frame sizes, every frame valid.
    void validate() const;
};

}  // namespace tvdm
