#include "tvdm/amcm/boxes.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "tvdm/numcore/errors.hpp"

namespace tvdm::amcm {

std::vector<float> BoxSequence::flat() const {
    std::vector<float> out;
    out.reserve(boxes.size() * 4);
    for (const auto& b : boxes) {
        out.push_back(static_cast<float>(b.x_min));
        out.push_back(static_cast<float>(b.y_min));
        out.push_back(static_cast<float>(b.x_max));
        out.push_back(static_cast<float>(b.y_max));
    }
    return out;
}

std::optional<PixelBox> extract_bbox(const std::vector<float>& alpha, std::size_t height, std::size_t width,
                                     float threshold) {
    if (alpha.size() != height * width) {
        throw ShapeError("extract_bbox: alpha has " + std::to_string(alpha.size()) + " values for a " +
                         std::to_string(height) + "x" + std::to_string(width) + " frame");
    }
    // Row range first, then the column range restricted to those rows.
    long top = -1, bottom = -1;
    for (std::size_t y = 0; y < height && top < 0; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            if (alpha[y * width + x] > threshold) {
                top = static_cast<long>(y);
                break;
            }
        }
    }
    if (top < 0) return std::nullopt;
    for (std::size_t y = height; y-- > static_cast<std::size_t>(top) && bottom < 0;) {
        for (std::size_t x = 0; x < width; ++x) {
            if (alpha[y * width + x] > threshold) {
                bottom = static_cast<long>(y);
                break;
            }
        }
    }
    long left = static_cast<long>(width), right = -1;
    for (long y = top; y <= bottom; ++y) {
        const float* row = alpha.data() + static_cast<std::size_t>(y) * width;
        for (long x = 0; x < left; ++x) {
            if (row[x] > threshold) {
                left = x;
                break;
            }
        }
        for (long x = static_cast<long>(width) - 1; x > right; --x) {
            if (row[x] > threshold) {
                right = x;
                break;
            }
        }
    }
    return PixelBox{static_cast<int>(left), static_cast<int>(top), static_cast<int>(right), static_cast<int>(bottom)};
}

NormalizedBox normalize_box(const PixelBox& box, std::size_t height, std::size_t width) {
    if (height < 2 || width < 2) throw ShapeError("normalize_box: frame must be at least 2x2");
    const auto w = static_cast<int>(width), h = static_cast<int>(height);
    if (box.x_min < 0 || box.y_min < 0 || box.x_max >= w || box.y_max >= h) {
        throw ShapeError("normalize_box: pixel box (" + std::to_string(box.x_min) + "," + std::to_string(box.y_min) + "," +
                         std::to_string(box.x_max) + "," + std::to_string(box.y_max) + ") exceeds a " +
                         std::to_string(width) + "x" + std::to_string(height) + " frame");
    }
    if (box.x_min > box.x_max || box.y_min > box.y_max) throw ShapeError("normalize_box: inverted box corners");
    const double sx = static_cast<double>(width - 1), sy = static_cast<double>(height - 1);
    return {box.x_min / sx, box.y_min / sy, box.x_max / sx, box.y_max / sy};
}

PixelBox denormalize_box(const NormalizedBox& box, std::size_t height, std::size_t width) {
    const double sx = static_cast<double>(width - 1), sy = static_cast<double>(height - 1);
    return {static_cast<int>(std::lround(box.x_min * sx)), static_cast<int>(std::lround(box.y_min * sy)),
            static_cast<int>(std::lround(box.x_max * sx)), static_cast<int>(std::lround(box.y_max * sy))};
}

BoxSequence normalize_boxes(const std::vector<std::optional<PixelBox>>& boxes, std::size_t height, std::size_t width) {
    BoxSequence seq;
    for (const auto& b : boxes) {
        if (b) {
            seq.boxes.push_back(normalize_box(*b, height, width));
            seq.valid.push_back(true);
        } else {
            seq.boxes.push_back({});
            seq.valid.push_back(false);
        }
    }
    return seq;
}

void validate_boxes(const BoxSequence& seq) {
    if (seq.valid.size() != seq.boxes.size()) throw ShapeError("box sequence: validity flags do not match rows");
    for (std::size_t i = 0; i < seq.boxes.size(); ++i) {
        const auto& b = seq.boxes[i];
        for (double v : {b.x_min, b.y_min, b.x_max, b.y_max}) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw ConfigError("box sequence: row " + std::to_string(i) + " has a coordinate outside [0, 1]");
            }
        }
        if (seq.valid[i] && (b.x_min > b.x_max || b.y_min > b.y_max)) {
            throw ConfigError("box sequence: row " + std::to_string(i) + " has inverted corners");
        }
    }
}

InferenceBoxes inference_boxes(const std::vector<float>& cond_alpha, std::size_t height, std::size_t width,
                               std::size_t frames, const std::optional<BoxSequence>& override_boxes, float threshold) {
    InferenceBoxes result;
    if (override_boxes) {
        validate_boxes(*override_boxes);
        if (override_boxes->size() != frames) {
            throw ConfigError("box override has " + std::to_string(override_boxes->size()) + " rows for " +
                              std::to_string(frames) + " frames");
        }
        result.boxes = *override_boxes;
        return result;
    }
    const auto box = extract_bbox(cond_alpha, height, width, threshold);
    NormalizedBox row{0.0, 0.0, 1.0, 1.0};
    if (box) {
        row = normalize_box(*box, height, width);
    } else {
        result.warning = "conditioned image has an empty alpha channel; using the full-frame box (unconstrained motion)";
        std::clog << "warning: " << *result.warning << '\n';
    }
    result.boxes.boxes.assign(frames, row);
    result.boxes.valid.assign(frames, true);
    return result;
}

void write_box_file(const std::filesystem::path& path, const BoxSequence& seq) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write box file " + path.string());
    out << std::setprecision(17);
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const auto b = seq.valid[i] ? seq.boxes[i] : NormalizedBox{};
        out << i << ' ' << b.x_min << ' ' << b.y_min << ' ' << b.x_max << ' ' << b.y_max << '\n';
    }
}

BoxSequence read_box_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open box file " + path.string());
    BoxSequence seq;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        std::size_t index = 0;
        NormalizedBox b;
        if (!(fields >> index >> b.x_min >> b.y_min >> b.x_max >> b.y_max)) {
            throw IoError("box file " + path.string() + ": malformed line " + std::to_string(line_no));
        }
        if (index != seq.size()) {
            throw IoError("box file " + path.string() + ": expected frame index " + std::to_string(seq.size()) +
                          " on line " + std::to_string(line_no) + ", found " + std::to_string(index));
        }
        const bool valid = !(b.x_min == 0.0 && b.y_min == 0.0 && b.x_max == 0.0 && b.y_max == 0.0);
        seq.boxes.push_back(b);
        seq.valid.push_back(valid);
    }
    validate_boxes(seq);
    return seq;
}

}  // namespace tvdm::amcm
