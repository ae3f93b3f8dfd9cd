#include "tvdm/dataio/rgba.hpp"

#include "tvdm/numcore/errors.hpp"

namespace tvdm {

void RGBAImage::validate() const {
    if (rgb.size() != height * width * 3 || alpha.size() != height * width) {
        throw ShapeError("RGBA image buffers do not match " + std::to_string(height) + "x" + std::to_string(width));
    }
    for (float v : rgb) {
        if (!(v >= 0.0f && v <= 1.0f)) throw ConfigError("RGBA image: rgb value outside [0, 1]");
    }
    for (float v : alpha) {
        if (!(v >= 0.0f && v <= 1.0f)) throw ConfigError("RGBA image: alpha value outside [0, 1]");
    }
}

void RGBAVideo::validate() const {
    if (frames.empty()) throw ShapeError("RGBA video has no frames");
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (frames[i].height != height() || frames[i].width != width()) {
            throw ShapeError("RGBA video: frame " + std::to_string(i) + " is " + std::to_string(frames[i].height) + "x" +
                             std::to_string(frames[i].width) + ", expected " + std::to_string(height()) + "x" +
                             std::to_string(width()));
        }
        frames[i].validate();
    }
}

}  // namespace tvdm
