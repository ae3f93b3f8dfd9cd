#pragma once

#include "tvdm/dataio/rgba.hpp"

namespace tvdm::autoenc {

struct SmoothOptions {
    int max_iterations = 200;
    float tolerance = 1e-4f;  // stop once no pixel moves by more than this
};

// Replaces RGB wherever alpha < 1 by neighbour-diffusion inpainting from the opaque pixels
// (Jacobi sweeps over the 4-neighbourhood, opaque pixels held fixed, frame edges reflecting).
// Unknown pixels start at the mean opaque colour, so the result does not depend on the input
// RGB under transparency and a second pass reproduces the first exactly. Alpha is untouched.
// Without opaque pixels the fill is the alpha-weighted mean colour, or 0.5 when alpha is all 0.
RGBAImage smooth_rgb(const RGBAImage& image, const SmoothOptions& options = {});

}  // namespace tvdm::autoenc
