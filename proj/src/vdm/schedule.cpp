#include "tvdm/vdm/schedule.hpp"

#include <cmath>

#include "tvdm/numcore/errors.hpp"
#include "tvdm/numcore/ops.hpp"

namespace tvdm::vdm {

double NoiseSchedule::alpha_bar_at(std::size_t t) const {
    if (t > T) throw ConfigError("timestep " + std::to_string(t) + " outside [0, " + std::to_string(T) + "]");
    return t == 0 ? 1.0 : alpha_bar[t - 1];
}

NoiseSchedule make_noise_schedule(std::vector<double> betas) {
    if (betas.empty()) throw ConfigError("noise schedule needs T >= 1");
    NoiseSchedule s;
    s.T = betas.size();
    double prod = 1.0;
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (!(betas[i] > 0.0 && betas[i] < 1.0)) {
            throw ConfigError("beta_" + std::to_string(i + 1) + " = " + std::to_string(betas[i]) + " is outside (0, 1)");
        }
        prod *= 1.0 - betas[i];
        s.alpha_bar.push_back(prod);
    }
    s.beta = std::move(betas);
    return s;
}

NoiseSchedule make_linear_schedule(std::size_t T, double beta_start, double beta_end) {
    if (T == 0) throw ConfigError("noise schedule needs T >= 1");
    std::vector<double> betas(T);
    for (std::size_t i = 0; i < T; ++i) {
        betas[i] = T == 1 ? beta_start : beta_start + (beta_end - beta_start) * static_cast<double>(i) / (T - 1);
    }
    return make_noise_schedule(std::move(betas));
}

template <typename T>
Tensor<T> q_sample(const Tensor<T>& z0, const std::vector<std::size_t>& t, const Tensor<T>& eps,
                   const NoiseSchedule& schedule) {
    if (z0.shape() != eps.shape()) {
        throw ShapeError("q_sample: z0 " + numcore::shape_str(z0.shape()) + " and eps " +
                         numcore::shape_str(eps.shape()) + " differ");
    }
    if (t.size() != z0.dim(0)) throw ShapeError("q_sample: need one timestep per batch item");
    const std::size_t per = z0.numel() / z0.dim(0);
    std::vector<T> a(z0.numel()), b(z0.numel());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < 1 || t[i] > schedule.T) {
            throw ConfigError("q_sample: timestep " + std::to_string(t[i]) + " outside [1, " + std::to_string(schedule.T) + "]");
        }
        const double ab = schedule.alpha_bar[t[i] - 1];
        std::fill(a.begin() + i * per, a.begin() + (i + 1) * per, static_cast<T>(std::sqrt(ab)));
        std::fill(b.begin() + i * per, b.begin() + (i + 1) * per, static_cast<T>(std::sqrt(1.0 - ab)));
    }
    using numcore::add;
    using numcore::mul;
    return add(mul(z0, Tensor<T>(z0.shape(), std::move(a))), mul(eps, Tensor<T>(z0.shape(), std::move(b))));
}

template Tensor<float> q_sample(const Tensor<float>&, const std::vector<std::size_t>&, const Tensor<float>&,
                                const NoiseSchedule&);
template Tensor<double> q_sample(const Tensor<double>&, const std::vector<std::size_t>&, const Tensor<double>&,
                                 const NoiseSchedule&);

}  // namespace tvdm::vdm
