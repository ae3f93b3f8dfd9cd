#pragma once

#include <functional>
#include <vector>

#include "tvdm/numcore/rng.hpp"
#include "tvdm/vdm/schedule.hpp"

namespace tvdm::vdm {

// Noise prediction for z_t at one timestep per leading-axis item.
template <typename T>
using EpsModel = std::function<Tensor<T>(const Tensor<T>& z_t, const std::vector<std::size_t>& t)>;

// t ~ U{1..T} per item, eps ~ N(0, I); ||eps - model(z_t, t)||^2 summed, averaged over the batch.
template <typename T>
Tensor<T> loss_eps(const EpsModel<T>& model, const Tensor<T>& z0, const NoiseSchedule& schedule, numcore::Rng& rng);

// Evenly spaced decreasing timesteps, first T, ending at T / steps (then the clean step 0).
std::vector<std::size_t> ddim_timesteps(std::size_t T, std::size_t steps);

// DDIM from z_T. eta = 0 is deterministic; eta > 0 adds the usual sigma_t noise drawn from rng.
template <typename T>
Tensor<T> ddim_sample_from(const EpsModel<T>& model, const Tensor<T>& z_T, const NoiseSchedule& schedule,
                           std::size_t steps, numcore::Rng& rng, double eta = 0.0);
// Same, starting from z_T ~ N(0, I) drawn from rng.
template <typename T>
Tensor<T> ddim_sample(const EpsModel<T>& model, const numcore::Shape& shape, const NoiseSchedule& schedule,
                      std::size_t steps, numcore::Rng& rng, double eta = 0.0);

}  // namespace tvdm::vdm
