#include "tvdm/evalkit/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "tvdm/numcore/errors.hpp"

namespace tvdm::evalkit {

namespace {

void require_same(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw ShapeError(std::string(what) + ": sizes " + std::to_string(a) + " and " + std::to_string(b) + " differ");
}

void require_same_video(const RGBAVideo& a, const RGBAVideo& b) {
    require_same(a.frames.size(), b.frames.size(), "video frame count");
    if (a.height() != b.height() || a.width() != b.width()) throw ShapeError("videos have different frame sizes");
}

}  // namespace

RGBImage composite_over(const RGBAImage& image, const std::array<float, 3>& background) {
    image.validate();
    RGBImage out{image.height, image.width, std::vector<float>(image.rgb.size())};
    for (std::size_t p = 0; p < image.pixels(); ++p) {
        const float a = image.alpha[p];
        for (std::size_t c = 0; c < 3; ++c) out.rgb[p * 3 + c] = a * image.rgb[p * 3 + c] + (1.0f - a) * background[c];
    }
    return out;
}

RGBAImage chroma_key(const RGBImage& image, const ChromaKeyOptions& options) {
    if (!(options.tolerance > 0.0 && options.tolerance < 1.0)) throw ConfigError("chroma key tolerance must lie in (0, 1)");
    require_same(image.rgb.size(), image.height * image.width * 3, "chroma_key buffer");
    RGBAImage out(image.height, image.width);
    out.rgb = image.rgb;
    for (std::size_t p = 0; p < out.pixels(); ++p) {
        double d2 = 0.0;
        for (std::size_t c = 0; c < 3; ++c) {
            const double d = image.rgb[p * 3 + c] - kKeyGreen[c];
            d2 += d * d;
        }
        out.alpha[p] = std::sqrt(d2) < options.tolerance ? 0.0f : 1.0f;
    }
    if (options.feather) {
        const auto keyed = out.alpha;
        const std::size_t H = out.height, W = out.width;
        for (std::size_t y = 0; y < H; ++y) {
            for (std::size_t x = 0; x < W; ++x) {
                if (keyed[y * W + x] == 0.0f) continue;
                const bool edge = (x > 0 && keyed[y * W + x - 1] == 0.0f) || (x + 1 < W && keyed[y * W + x + 1] == 0.0f) ||
                                  (y > 0 && keyed[(y - 1) * W + x] == 0.0f) || (y + 1 < H && keyed[(y + 1) * W + x] == 0.0f);
                if (edge) out.alpha[y * W + x] = 0.5f;
            }
        }
    }
    return out;
}

double alpha_iou(std::span<const float> pred, std::span<const float> truth, double threshold) {
    require_same(pred.size(), truth.size(), "alpha_iou");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool a = pred[i] > threshold, b = truth[i] > threshold;
        inter += a && b;
        uni += a || b;
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double alpha_iou(const RGBAVideo& pred, const RGBAVideo& truth, double threshold) {
    require_same_video(pred, truth);
    if (pred.frames.empty()) return 1.0;
    double s = 0.0;
    for (std::size_t i = 0; i < pred.frames.size(); ++i) s += alpha_iou(pred.frames[i].alpha, truth.frames[i].alpha, threshold);
    return s / static_cast<double>(pred.frames.size());
}

double artifact_escape_ratio(const RGBAVideo& video, const amcm::BoxSequence& boxes, double dilation_px) {
    amcm::validate_boxes(boxes);
    require_same(video.frames.size(), boxes.size(), "artifact_escape_ratio frames vs boxes");
    if (dilation_px < 0.0) throw ConfigError("dilation must be >= 0");
    double total = 0.0, outside = 0.0;
    for (std::size_t i = 0; i < video.frames.size(); ++i) {
        const auto& f = video.frames[i];
        const auto& b = boxes.boxes[i];
        const double sx = static_cast<double>(f.width - 1), sy = static_cast<double>(f.height - 1);
        const double x0 = b.x_min * sx - dilation_px, x1 = b.x_max * sx + dilation_px;
        const double y0 = b.y_min * sy - dilation_px, y1 = b.y_max * sy + dilation_px;
        for (std::size_t y = 0; y < f.height; ++y) {
            for (std::size_t x = 0; x < f.width; ++x) {
                const double a = f.a(y, x);
                total += a;
                const bool inside = boxes.valid[i] && x >= x0 && x <= x1 && y >= y0 && y <= y1;
                if (!inside) outside += a;
            }
        }
    }
    return total > 0.0 ? outside / total : 0.0;
}

double psnr(std::span<const float> pred, std::span<const float> truth) {
    require_same(pred.size(), truth.size(), "psnr");
    if (pred.empty()) throw ShapeError("psnr of empty inputs");
    double se = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = static_cast<double>(pred[i]) - truth[i];
        se += d * d;
    }
    const double mse = se / static_cast<double>(pred.size());
    if (mse == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double composite_psnr(const RGBAVideo& pred, const RGBAVideo& truth) {
    require_same_video(pred, truth);
    std::vector<float> a, b;
    for (std::size_t i = 0; i < pred.frames.size(); ++i) {
        const auto pa = composite_over(pred.frames[i], kBlack).rgb, pb = composite_over(truth.frames[i], kBlack).rgb;
        a.insert(a.end(), pa.begin(), pa.end());
        b.insert(b.end(), pb.begin(), pb.end());
    }
    return psnr(a, b);
}

std::vector<bool> boundary_ring(std::span<const float> alpha, std::size_t H, std::size_t W) {
    require_same(alpha.size(), H * W, "boundary_ring");
    std::vector<bool> ring(H * W, false);
    auto in = [&](std::size_t y, std::size_t x) { return alpha[y * W + x] > 0.5f; };
    for (std::size_t y = 0; y < H; ++y) {
        for (std::size_t x = 0; x < W; ++x) {
            const bool c = in(y, x);
            ring[y * W + x] = (x > 0 && in(y, x - 1) != c) || (x + 1 < W && in(y, x + 1) != c) ||
                              (y > 0 && in(y - 1, x) != c) || (y + 1 < H && in(y + 1, x) != c);
        }
    }
    return ring;
}

RingErrors ring_errors(std::span<const float> pred, std::span<const float> truth, std::size_t H, std::size_t W) {
    require_same(pred.size(), truth.size(), "ring_errors");
    const auto ring = boundary_ring(truth, H, W);
    RingErrors r;
    std::size_t ring_bad = 0, interior_bad = 0;
    for (std::size_t p = 0; p < pred.size(); ++p) {
        const bool bad = (pred[p] > 0.5f) != (truth[p] > 0.5f);
        if (ring[p]) {
            ++r.ring_pixels;
            ring_bad += bad;
        } else {
            ++r.interior_pixels;
            interior_bad += bad;
        }
    }
    r.ring_rate = r.ring_pixels ? static_cast<double>(ring_bad) / r.ring_pixels : 0.0;
    r.interior_rate = r.interior_pixels ? static_cast<double>(interior_bad) / r.interior_pixels : 0.0;
    return r;
}

double fringe_score(const RGBAImage& image) {
    const auto ring = boundary_ring(image.alpha, image.height, image.width);
    double spill = 0.0, mass = 0.0;
    for (std::size_t p = 0; p < image.pixels(); ++p) {
        if (!ring[p] || image.alpha[p] <= 0.5f) continue;
        const float r = image.rgb[p * 3], g = image.rgb[p * 3 + 1], b = image.rgb[p * 3 + 2];
        spill += image.alpha[p] * std::max(0.0f, g - std::max(r, b));
        mass += image.alpha[p];
    }
    return mass > 0.0 ? spill / mass : 0.0;
}

double fringe_score(const RGBAVideo& video) {
    if (video.frames.empty()) return 0.0;
    double s = 0.0;
    for (const auto& f : video.frames) s += fringe_score(f);
    return s / static_cast<double>(video.frames.size());
}

}  // namespace tvdm::evalkit
