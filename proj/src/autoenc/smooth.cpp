#include "tvdm/autoenc/smooth.hpp"

#include <array>
#include <cmath>

namespace tvdm::autoenc {

RGBAImage smooth_rgb(const RGBAImage& image, const SmoothOptions& options) {
    image.validate();
    RGBAImage out = image;
    const std::size_t h = image.height, w = image.width, n = image.pixels();
    std::vector<char> known(n, 0);
    std::array<double, 3> opaque_sum{}, weighted_sum{};
    double opaque_count = 0.0, alpha_mass = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        const float a = image.alpha[p];
        if (a >= 1.0f) {
            known[p] = 1;
            opaque_count += 1.0;
            for (std::size_t c = 0; c < 3; ++c) opaque_sum[c] += image.rgb[p * 3 + c];
        }
        alpha_mass += a;
        for (std::size_t c = 0; c < 3; ++c) weighted_sum[c] += a * image.rgb[p * 3 + c];
    }
    if (opaque_count == static_cast<double>(n)) return out;

    std::array<float, 3> fill{0.5f, 0.5f, 0.5f};
    if (opaque_count > 0.0) {
        for (std::size_t c = 0; c < 3; ++c) fill[c] = static_cast<float>(opaque_sum[c] / opaque_count);
    } else if (alpha_mass > 0.0) {
        for (std::size_t c = 0; c < 3; ++c) fill[c] = static_cast<float>(weighted_sum[c] / alpha_mass);
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (!known[p]) {
            for (std::size_t c = 0; c < 3; ++c) out.rgb[p * 3 + c] = fill[c];
        }
    }
    if (opaque_count == 0.0) return out;

    std::vector<float> next = out.rgb;
    for (int it = 0; it < options.max_iterations; ++it) {
        float max_update = 0.0f;
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                const std::size_t p = y * w + x;
                if (known[p]) continue;
                // Reflecting edges: a missing neighbour is replaced by the pixel itself.
                const std::size_t up = y > 0 ? p - w : p, down = y + 1 < h ? p + w : p;
                const std::size_t left = x > 0 ? p - 1 : p, right = x + 1 < w ? p + 1 : p;
                for (std::size_t c = 0; c < 3; ++c) {
                    const float v = 0.25f * (out.rgb[up * 3 + c] + out.rgb[down * 3 + c] + out.rgb[left * 3 + c] +
                                             out.rgb[right * 3 + c]);
                    max_update = std::max(max_update, std::abs(v - out.rgb[p * 3 + c]));
                    next[p * 3 + c] = v;
                }
            }
        }
        out.rgb.swap(next);
        // Keep both buffers identical on unchanged pixels.
        next = out.rgb;
        if (max_update < options.tolerance) break;
    }
    return out;
}

}  // namespace tvdm::autoenc
