#include "tvdm/autoenc/image_tensor.hpp"

#include <algorithm>

#include "tvdm/numcore/errors.hpp"

namespace tvdm::autoenc {

namespace {

void require_uniform(std::span<const RGBAImage> images) {
    if (images.empty()) throw ShapeError("image batch is empty");
    for (const auto& img : images) {
        if (img.height != images[0].height || img.width != images[0].width) {
            throw ShapeError("image batch mixes " + std::to_string(images[0].width) + "x" +
                             std::to_string(images[0].height) + " and " + std::to_string(img.width) + "x" +
                             std::to_string(img.height) + " frames");
        }
    }
}

}  // namespace

void require_latent_divisible(std::size_t height, std::size_t width) {
    if (height == 0 || width == 0 || height % 8 != 0 || width % 8 != 0) {
        throw ShapeError("image size " + std::to_string(width) + "x" + std::to_string(height) +
                         " is not a multiple of 8 in both dimensions");
    }
}

template <typename T>
Tensor<T> rgb_tensor(std::span<const RGBAImage> images) {
    require_uniform(images);
    const std::size_t h = images[0].height, w = images[0].width, hw = h * w;
    std::vector<T> data(images.size() * 3 * hw);
    for (std::size_t b = 0; b < images.size(); ++b) {
        for (std::size_t p = 0; p < hw; ++p) {
            for (std::size_t c = 0; c < 3; ++c) data[(b * 3 + c) * hw + p] = static_cast<T>(images[b].rgb[p * 3 + c]);
        }
    }
    return Tensor<T>({images.size(), 3, h, w}, std::move(data));
}

template <typename T>
Tensor<T> alpha_tensor(std::span<const RGBAImage> images) {
    require_uniform(images);
    const std::size_t h = images[0].height, w = images[0].width, hw = h * w;
    std::vector<T> data(images.size() * hw);
    for (std::size_t b = 0; b < images.size(); ++b) {
        std::transform(images[b].alpha.begin(), images[b].alpha.end(), data.begin() + b * hw,
                       [](float a) { return static_cast<T>(a); });
    }
    return Tensor<T>({images.size(), 1, h, w}, std::move(data));
}

template <typename T>
std::vector<RGBAImage> to_images(const Tensor<T>& rgb, const Tensor<T>& alpha) {
    if (rgb.rank() != 4 || rgb.dim(1) != 3) throw ShapeError("to_images: rgb must be [B, 3, H, W], got " + numcore::shape_str(rgb.shape()));
    const std::size_t B = rgb.dim(0), h = rgb.dim(2), w = rgb.dim(3), hw = h * w;
    if (alpha.defined() && alpha.shape() != numcore::Shape{B, 1, h, w}) {
        throw ShapeError("to_images: alpha shape " + numcore::shape_str(alpha.shape()) + " does not match rgb");
    }
    auto clamp01 = [](T v) { return static_cast<float>(std::clamp(v, T(0), T(1))); };
    std::vector<RGBAImage> out;
    const auto r = rgb.data();
    for (std::size_t b = 0; b < B; ++b) {
        RGBAImage img(h, w);
        for (std::size_t p = 0; p < hw; ++p) {
            for (std::size_t c = 0; c < 3; ++c) img.rgb[p * 3 + c] = clamp01(r[(b * 3 + c) * hw + p]);
            img.alpha[p] = alpha.defined() ? clamp01(alpha.data()[b * hw + p]) : 1.0f;
        }
        out.push_back(std::move(img));
    }
    return out;
}

template Tensor<float> rgb_tensor<float>(std::span<const RGBAImage>);
template Tensor<double> rgb_tensor<double>(std::span<const RGBAImage>);
template Tensor<float> alpha_tensor<float>(std::span<const RGBAImage>);
template Tensor<double> alpha_tensor<double>(std::span<const RGBAImage>);
template std::vector<RGBAImage> to_images<float>(const Tensor<float>&, const Tensor<float>&);
template std::vector<RGBAImage> to_images<double>(const Tensor<double>&, const Tensor<double>&);

}  // namespace tvdm::autoenc
