#include "tvdm/dataio/sprites.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tvdm/numcore/errors.hpp"

namespace tvdm::dataio {

namespace {

constexpr int kSupersample = 4;
constexpr double kStarInnerRatio = 0.45;

const char* shape_name(SpriteShape s) {
    switch (s) {
        case SpriteShape::circle: return "circle";
        case SpriteShape::square: return "square";
        case SpriteShape::star: return "star";
    }
    return "?";
}

const char* direction_name(Direction d) {
    switch (d) {
        case Direction::right: return "right";
        case Direction::left: return "left";
        case Direction::up: return "up";
        case Direction::down: return "down";
    }
    return "?";
}

// Radius of a disc that contains the sprite at any rotation used by its motion, plus a
// one-pixel transparent margin.
int bounding_extent(const SpriteParams& p) {
    int ext = p.size;
    if (p.shape == SpriteShape::square && p.motion == SpriteMotion::rotate) {
        ext = static_cast<int>(std::ceil(p.size * std::numbers::sqrt2));
    }
    return ext + 1 + (p.soft_edge ? 1 : 0);
}

struct Pose {
    int cx, cy;
    double angle;
};

// Per-frame offsets of the centre relative to the start position.
std::vector<Pose> trajectory(const SpriteParams& p, int x0, int y0) {
    std::vector<Pose> poses;
    for (std::size_t i = 0; i < p.frames; ++i) {
        const int step = static_cast<int>(i);
        Pose pose{x0, y0, 0.0};
        switch (p.motion) {
            case SpriteMotion::drift:
                if (p.direction == Direction::right) pose.cx += p.speed * step;
                if (p.direction == Direction::left) pose.cx -= p.speed * step;
                if (p.direction == Direction::down) pose.cy += p.speed * step;
                if (p.direction == Direction::up) pose.cy -= p.speed * step;
                break;
            case SpriteMotion::oscillate:
                pose.cx += static_cast<int>(std::lround(
                    p.amplitude * std::sin(2.0 * std::numbers::pi * step / static_cast<double>(p.frames))));
                break;
            case SpriteMotion::rotate:
                pose.angle = p.angular_speed * step;
                break;
            case SpriteMotion::still:
                break;
        }
        poses.push_back(pose);
    }
    return poses;
}

bool fits(const SpriteParams& p, int x0, int y0) {
    const int ext = bounding_extent(p);
    for (const auto& pose : trajectory(p, x0, y0)) {
        if (pose.cx - ext < 0 || pose.cy - ext < 0 || pose.cx + ext > static_cast<int>(p.width) - 1 ||
            pose.cy + ext > static_cast<int>(p.height) - 1) {
            return false;
        }
    }
    return true;
}

// Feasible start range along one axis, or empty (lo > hi).
std::pair<int, int> start_range(const SpriteParams& p, bool horizontal) {
    const int ext = bounding_extent(p);
    const int limit = static_cast<int>(horizontal ? p.width : p.height) - 1;
    int lo = ext, hi = limit - ext;
    const int travel = p.speed * static_cast<int>(p.frames - 1);
    if (p.motion == SpriteMotion::drift) {
        const bool along = horizontal == (p.direction == Direction::right || p.direction == Direction::left);
        const bool negative = p.direction == Direction::left || p.direction == Direction::up;
        if (along) {
            if (negative) lo += travel;
            else hi -= travel;
        }
    } else if (p.motion == SpriteMotion::oscillate && horizontal) {
        lo += p.amplitude;
        hi -= p.amplitude;
    }
    return {lo, hi};
}

bool inside_shape(const SpriteParams& p, const Pose& pose, double px, double py) {
    const double dx = px - pose.cx, dy = py - pose.cy;
    switch (p.shape) {
        case SpriteShape::circle:
            return dx * dx + dy * dy <= static_cast<double>(p.size) * p.size;
        case SpriteShape::square: {
            const double c = std::cos(pose.angle), s = std::sin(pose.angle);
            const double u = dx * c + dy * s, v = -dx * s + dy * c;
            return std::abs(u) <= p.size && std::abs(v) <= p.size;
        }
        case SpriteShape::star: {
            // Even-odd crossing test against the 10-vertex outline.
            std::array<double, 10> vx{}, vy{};
            for (int k = 0; k < 10; ++k) {
                const double radius = (k % 2 == 0) ? p.size : p.size * kStarInnerRatio;
                const double theta = pose.angle - std::numbers::pi / 2 + k * std::numbers::pi / 5;
                vx[k] = radius * std::cos(theta);
                vy[k] = radius * std::sin(theta);
            }
            bool in = false;
            for (int i = 0, j = 9; i < 10; j = i++) {
                if ((vy[i] > dy) != (vy[j] > dy) && dx < (vx[j] - vx[i]) * (dy - vy[i]) / (vy[j] - vy[i]) + vx[i]) {
                    in = !in;
                }
            }
            return in;
        }
    }
    return false;
}

}  // namespace

const std::vector<PaletteColor>& palette() {
    static const std::vector<PaletteColor> colors = {
        {"red", {0.92f, 0.16f, 0.12f}},   {"blue", {0.16f, 0.30f, 0.95f}},   {"yellow", {0.98f, 0.86f, 0.14f}},
        {"purple", {0.58f, 0.22f, 0.80f}}, {"orange", {0.98f, 0.55f, 0.10f}}, {"white", {0.95f, 0.95f, 0.95f}},
        {"cyan", {0.10f, 0.82f, 0.90f}},   {"pink", {0.96f, 0.45f, 0.70f}},
    };
    return colors;
}

std::vector<std::string> shape_names() { return {"circle", "square", "star"}; }

std::vector<std::string> motion_phrases() {
    return {"drifting right", "drifting left", "drifting up", "drifting down", "oscillating", "rotating",
            "staying still", "blinking"};
}

std::string caption_for(const SpriteParams& p) {
    std::string phrase;
    switch (p.motion) {
        case SpriteMotion::drift: phrase = std::string("drifting ") + direction_name(p.direction); break;
        case SpriteMotion::oscillate: phrase = "oscillating"; break;
        case SpriteMotion::rotate: phrase = "rotating"; break;
        case SpriteMotion::still: phrase = p.blink ? "blinking" : "staying still"; break;
    }
    return std::string("a ") + palette().at(p.color).name + " " + shape_name(p.shape) + " " + phrase;
}

std::vector<std::string> caption_vocabulary() {
    std::vector<std::string> words{"a"};
    for (const auto& c : palette()) words.emplace_back(c.name);
    for (const auto& s : shape_names()) words.push_back(s);
    for (const auto& phrase : motion_phrases()) {
        std::size_t start = 0;
        while (start < phrase.size()) {
            const auto end = std::min(phrase.find(' ', start), phrase.size());
            words.push_back(phrase.substr(start, end - start));
            start = end + 1;
        }
    }
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    return words;
}

SpriteVideo gen_sprite_video(std::uint64_t seed, const SpriteParams& p) {
    if (p.frames == 0 || p.height == 0 || p.width == 0) throw ConfigError("sprite video: frames/height/width must be positive");
    if (p.size < 1) throw ConfigError("sprite video: size must be at least 1 pixel");
    if (p.color >= palette().size()) throw ConfigError("sprite video: palette index out of range");
    const int ext = bounding_extent(p);
    if (2 * ext + 1 > static_cast<int>(std::min(p.height, p.width))) {
        throw ConfigError("sprite video: sprite of extent " + std::to_string(2 * ext + 1) + " px is larger than the " +
                          std::to_string(p.width) + "x" + std::to_string(p.height) + " frame");
    }
    numcore::Rng rng(seed);
    const auto [xlo, xhi] = start_range(p, true);
    const auto [ylo, yhi] = start_range(p, false);
    if (xlo > xhi || ylo > yhi) throw ConfigError("sprite video: motion carries the sprite out of frame");
    const int x0 = p.start_x ? *p.start_x : static_cast<int>(rng.uniform_int(xlo, xhi));
    const int y0 = p.start_y ? *p.start_y : static_cast<int>(rng.uniform_int(ylo, yhi));
    if (!fits(p, x0, y0)) throw ConfigError("sprite video: start position puts the sprite out of frame");

    SpriteVideo out;
    out.params = p;
    out.video.caption = caption_for(p);
    const auto base = palette()[p.color].rgb;
    const auto poses = trajectory(p, x0, y0);
    for (std::size_t i = 0; i < p.frames; ++i) {
        const auto& pose = poses[i];
        RGBAImage frame(p.height, p.width);
        amcm::PixelBox box{static_cast<int>(p.width), static_cast<int>(p.height), -1, -1};
        const float blink = (p.motion == SpriteMotion::still && p.blink && i % 2 == 1) ? 0.6f : 1.0f;
        for (std::size_t y = 0; y < p.height; ++y) {
            for (std::size_t x = 0; x < p.width; ++x) {
                float coverage = 0.0f;
                if (p.soft_edge) {
                    int hits = 0;
                    for (int sy = 0; sy < kSupersample; ++sy) {
                        for (int sx = 0; sx < kSupersample; ++sx) {
                            const double px = x + (sx + 0.5) / kSupersample - 0.5;
                            const double py = y + (sy + 0.5) / kSupersample - 0.5;
                            hits += inside_shape(p, pose, px, py) ? 1 : 0;
                        }
                    }
                    coverage = static_cast<float>(hits) / (kSupersample * kSupersample);
                } else {
                    coverage = inside_shape(p, pose, static_cast<double>(x), static_cast<double>(y)) ? 1.0f : 0.0f;
                }
                if (coverage <= 0.0f) continue;
                frame.a(y, x) = coverage;
                // Vertical shading: top of the sprite is brighter.
                const double t = std::clamp((pose.cy + ext - static_cast<double>(y)) / (2.0 * ext), 0.0, 1.0);
                const auto shade = static_cast<float>(0.8 + 0.2 * t) * blink;
                for (std::size_t c = 0; c < 3; ++c) frame.channel(y, x, c) = std::min(1.0f, base[c] * shade);
                box.x_min = std::min(box.x_min, static_cast<int>(x));
                box.y_min = std::min(box.y_min, static_cast<int>(y));
                box.x_max = std::max(box.x_max, static_cast<int>(x));
                box.y_max = std::max(box.y_max, static_cast<int>(y));
            }
        }
        out.video.frames.push_back(std::move(frame));
        out.boxes.push_back(box);
    }
    return out;
}

SpriteParams random_sprite_params(numcore::Rng& rng, std::size_t height, std::size_t width, std::size_t frames,
                                  double soft_edge_probability) {
    const int short_side = static_cast<int>(std::min(height, width));
    const int size_lo = std::max(2, short_side / 8);
    const int size_hi = std::max(size_lo, short_side * 7 / 32);
    for (int attempt = 0; attempt < 200; ++attempt) {
        SpriteParams p;
        p.height = height;
        p.width = width;
        p.frames = frames;
        p.shape = static_cast<SpriteShape>(rng.uniform_int(0, 2));
        p.color = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(palette().size()) - 1));
        p.motion = static_cast<SpriteMotion>(rng.uniform_int(0, 3));
        if (p.shape == SpriteShape::circle && p.motion == SpriteMotion::rotate) p.motion = SpriteMotion::drift;
        p.direction = static_cast<Direction>(rng.uniform_int(0, 3));
        p.size = static_cast<int>(rng.uniform_int(size_lo, size_hi));
        p.speed = static_cast<int>(rng.uniform_int(1, 2));
        p.amplitude = static_cast<int>(rng.uniform_int(2, std::max(2, short_side / 8)));
        p.angular_speed = rng.uniform(0.15, 0.4);
        p.blink = rng.uniform() < 0.5;
        p.soft_edge = rng.uniform() < soft_edge_probability;
        const auto [xlo, xhi] = start_range(p, true);
        const auto [ylo, yhi] = start_range(p, false);
        if (2 * bounding_extent(p) + 1 <= short_side && xlo <= xhi && ylo <= yhi) return p;
    }
    throw ConfigError("random_sprite_params: no sprite fits a " + std::to_string(width) + "x" + std::to_string(height) +
                      " frame over " + std::to_string(frames) + " frames");
}

}  // namespace tvdm::dataio
