#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tvdm/amcm/boxes.hpp"
#include "tvdm/dataio/rgba.hpp"
#include "tvdm/numcore/rng.hpp"

namespace tvdm::dataio {

enum class SpriteShape { circle, square, star };
enum class SpriteMotion { drift, oscillate, rotate, still };
enum class Direction { right, left, up, down };

struct PaletteColor {
    const char* name;
    std::array<float, 3> rgb;
};

// Closed palette. Every entry is chroma-distant from the key green (0, 1, 0).
const std::vector<PaletteColor>& palette();

struct SpriteParams {
    SpriteShape shape = SpriteShape::circle;
    std::size_t color = 0;  // palette index
    SpriteMotion motion = SpriteMotion::still;
    Direction direction = Direction::right;  // drift only
    int speed = 1;                           // drift: pixels per frame
    int amplitude = 3;                       // oscillate: peak horizontal offset in pixels
    double angular_speed = 0.3;              // rotate: radians per frame
    bool blink = false;                      // still: brightness alternates, alpha stays fixed
    int size = 6;                            // radius / half-extent in pixels
    bool soft_edge = false;                  // 4x4 supersampled coverage on the boundary ring
    std::size_t frames = 8;
    std::size_t height = 32;
    std::size_t width = 32;
    std::optional<int> start_x;  // chosen from the seed when unset
    std::optional<int> start_y;
};

struct SpriteVideo {
    RGBAVideo video;
    // Per-frame box of every pixel with nonzero coverage, tracked while rasterizing.
    std::vector<amcm::PixelBox> boxes;
    SpriteParams params;
};

// Deterministic in (seed, params). Throws ConfigError when the sprite or its trajectory
// cannot stay fully inside the frame.
SpriteVideo gen_sprite_video(std::uint64_t seed, const SpriteParams& params);

// Random shape/color/motion draw for dataset generation.
SpriteParams random_sprite_params(numcore::Rng& rng, std::size_t height, std::size_t width, std::size_t frames,
                                  double soft_edge_probability);

std::string caption_for(const SpriteParams& params);
// Every word that can appear in a generated caption.
std::vector<std::string> caption_vocabulary();
std::vector<std::string> shape_names();
std::vector<std::string> motion_phrases();

}  // namespace tvdm::dataio
