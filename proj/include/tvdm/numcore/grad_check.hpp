#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tvdm/numcore/errors.hpp"
#include "tvdm/numcore/tensor.hpp"

namespace tvdm::numcore {

// The checked function is not a pure function of its inputs.
class GradCheckError : public Error {
public:
    using Error::Error;
};

struct GradCheckOptions {
    double step = 1e-4;
    // 0 checks every element; otherwise a seeded random subset of this many per input.
    std::size_t max_elements_per_input = 0;
    std::uint64_t seed = 0;
};

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t elements_checked = 0;
};

// Central finite differences against the reverse-mode gradient, in double precision.
// Relative error per element is |g_ad - g_fd| / max(1, |g_ad|, |g_fd|).
GradCheckResult grad_check(const std::function<Tensor<double>()>& f, const std::vector<Tensor<double>>& inputs,
                           const GradCheckOptions& options = {});

}  // namespace tvdm::numcore
