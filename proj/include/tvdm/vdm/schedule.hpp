#pragma once

#include <cstddef>
#include <vector>

#include "tvdm/numcore/tensor.hpp"

namespace tvdm::vdm {

using numcore::Tensor;

// beta[t - 1] and alpha_bar[t - 1] hold the values for t = 1..T.
struct NoiseSchedule {
    std::size_t T = 0;
    std::vector<double> beta;
    std::vector<double> alpha_bar;

    // alpha_bar for t in [0, T]; t = 0 is the clean signal (1).
    double alpha_bar_at(std::size_t t) const;
};

// Throws ConfigError unless every beta lies in (0, 1).
NoiseSchedule make_noise_schedule(std::vector<double> betas);
// Linear betas from beta_start to beta_end inclusive.
NoiseSchedule make_linear_schedule(std::size_t T, double beta_start = 1e-4, double beta_end = 2e-2);

// sqrt(alpha_bar_t) z0 + sqrt(1 - alpha_bar_t) eps, with one t per leading-axis item.
template <typename T>
Tensor<T> q_sample(const Tensor<T>& z0, const std::vector<std::size_t>& t, const Tensor<T>& eps,
                   const NoiseSchedule& schedule);

}  // namespace tvdm::vdm
