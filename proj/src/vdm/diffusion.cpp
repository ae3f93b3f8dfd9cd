#include "tvdm/vdm/diffusion.hpp"

#include <cmath>

#include "tvdm/numcore/errors.hpp"
#include "tvdm/numcore/ops.hpp"

namespace tvdm::vdm {

using namespace numcore;

template <typename T>
Tensor<T> loss_eps(const EpsModel<T>& model, const Tensor<T>& z0, const NoiseSchedule& schedule, Rng& rng) {
    const std::size_t B = z0.dim(0);
    std::vector<std::size_t> t(B);
    for (auto& ti : t) ti = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(schedule.T)));
    const auto eps = Tensor<T>::randn(z0.shape(), rng);
    const auto pred = model(q_sample(z0, t, eps, schedule), t);
    if (pred.shape() != z0.shape()) {
        throw ShapeError("loss_eps: prediction " + shape_str(pred.shape()) + " does not match latents " + shape_str(z0.shape()));
    }
    return scale(sum_squared_error(eps, pred), T(1) / static_cast<T>(B));
}

std::vector<std::size_t> ddim_timesteps(std::size_t T, std::size_t steps) {
    if (steps == 0) throw ConfigError("sampler needs at least one step");
    if (steps > T) throw ConfigError("sampler steps " + std::to_string(steps) + " exceed T = " + std::to_string(T));
    std::vector<std::size_t> ts;
    for (std::size_t k = steps; k >= 1; --k) ts.push_back((k * T) / steps);
    return ts;
}

template <typename T>
Tensor<T> ddim_sample_from(const EpsModel<T>& model, const Tensor<T>& z_T, const NoiseSchedule& schedule,
                           std::size_t steps, Rng& rng, double eta) {
    if (eta < 0.0) throw ConfigError("eta must be >= 0");
    const auto ts = ddim_timesteps(schedule.T, steps);
    NoGradGuard no_grad;
    std::vector<T> z(z_T.data().begin(), z_T.data().end());
    const Shape shape = z_T.shape();
    const std::size_t B = shape[0];
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const std::size_t t = ts[i], t_prev = i + 1 < ts.size() ? ts[i + 1] : 0;
        const double ab = schedule.alpha_bar_at(t), ab_prev = schedule.alpha_bar_at(t_prev);
        const auto eps = model(Tensor<T>(shape, z), std::vector<std::size_t>(B, t));
        if (eps.shape() != shape) throw ShapeError("ddim: model output " + shape_str(eps.shape()) + " does not match " + shape_str(shape));
        const double sigma =
            eta * std::sqrt(std::max(0.0, (1.0 - ab_prev) / (1.0 - ab) * (1.0 - ab / ab_prev)));
        const double dir = std::sqrt(std::max(0.0, 1.0 - ab_prev - sigma * sigma));
        const auto e = eps.data();
        for (std::size_t k = 0; k < z.size(); ++k) {
            const double x0 = (z[k] - std::sqrt(1.0 - ab) * e[k]) / std::sqrt(ab);
            double next = std::sqrt(ab_prev) * x0 + dir * e[k];
            if (sigma > 0.0) next += sigma * rng.normal();
            z[k] = static_cast<T>(next);
        }
    }
    return Tensor<T>(shape, std::move(z));
}

template <typename T>
Tensor<T> ddim_sample(const EpsModel<T>& model, const Shape& shape, const NoiseSchedule& schedule, std::size_t steps,
                      Rng& rng, double eta) {
    const auto z_T = Tensor<T>::randn(shape, rng);
    return ddim_sample_from(model, z_T, schedule, steps, rng, eta);
}

#define TVDM_INSTANTIATE(T)                                                                                  \
    template Tensor<T> loss_eps(const EpsModel<T>&, const Tensor<T>&, const NoiseSchedule&, Rng&);           \
    template Tensor<T> ddim_sample_from(const EpsModel<T>&, const Tensor<T>&, const NoiseSchedule&,         \
                                        std::size_t, Rng&, double);                                          \
    template Tensor<T> ddim_sample(const EpsModel<T>&, const Shape&, const NoiseSchedule&, std::size_t, Rng&, \
                                   double);

TVDM_INSTANTIATE(float)
TVDM_INSTANTIATE(double)

}  // namespace tvdm::vdm
