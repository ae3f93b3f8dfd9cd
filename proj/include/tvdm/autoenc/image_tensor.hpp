#pragma once

#include <span>
#include <vector>

#include "tvdm/dataio/rgba.hpp"
#include "tvdm/numcore/tensor.hpp"

namespace tvdm::autoenc {

using numcore::Tensor;

// [B, 3, H, W] / [B, 1, H, W] from equally sized images. Throws ShapeError on mixed sizes.
template <typename T> Tensor<T> rgb_tensor(std::span<const RGBAImage> images);
template <typename T> Tensor<T> alpha_tensor(std::span<const RGBAImage> images);

// Inverse of the above; values are clamped to [0, 1]. alpha may be undefined (alpha = 1).
template <typename T>
std::vector<RGBAImage> to_images(const Tensor<T>& rgb, const Tensor<T>& alpha);

// Throws ShapeError unless H and W are positive multiples of 8.
void require_latent_divisible(std::size_t height, std::size_t width);

}  // namespace tvdm::autoenc
