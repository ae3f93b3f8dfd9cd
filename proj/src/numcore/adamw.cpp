#include "tvdm/numcore/adamw.hpp"

#include <cmath>

#include "tvdm/numcore/errors.hpp"

namespace tvdm::numcore {

template <typename T>
AdamWState<T> make_adamw_state(const ParamList<T>& params, const AdamWHyper& hyper) {
    AdamWState<T> state;
    state.hyper = hyper;
    for (const auto& p : params) {
        state.m.emplace_back(p.tensor.numel(), T(0));
        state.v.emplace_back(p.tensor.numel(), T(0));
    }
    return state;
}

template <typename T>
void adamw_step(const ParamList<T>& params, AdamWState<T>& state) {
    if (state.m.size() != params.size() || state.v.size() != params.size()) {
        throw ShapeError("adamw_step: optimizer state tracks " + std::to_string(state.m.size()) + " tensors but " +
                         std::to_string(params.size()) + " parameters were given");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& p = params[i];
        if (state.m[i].size() != p.tensor.numel() || state.v[i].size() != p.tensor.numel()) {
            throw ShapeError("adamw_step: moment shape mismatch for parameter " + p.name);
        }
        for (T g : p.tensor.grad()) {
            if (!std::isfinite(g)) {
                throw NumericError("adamw_step: non-finite gradient in parameter " + p.name + " at step " +
                                   std::to_string(state.step + 1) + "; update refused");
            }
        }
    }

    const auto& h = state.hyper;
    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double bias1 = 1.0 - std::pow(h.beta1, t);
    const double bias2 = 1.0 - std::pow(h.beta2, t);
    const T decay = static_cast<T>(1.0 - h.lr * h.weight_decay);
    const T b1 = static_cast<T>(h.beta1), b2 = static_cast<T>(h.beta2);
    const T lr = static_cast<T>(h.lr), eps = static_cast<T>(h.eps);
    const T inv_bias1 = static_cast<T>(1.0 / bias1), inv_bias2 = static_cast<T>(1.0 / bias2);

    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor<T> param = params[i].tensor;
        auto values = param.mutable_data();
        const auto grad = param.grad();
        auto& m = state.m[i];
        auto& v = state.v[i];
        for (std::size_t j = 0; j < values.size(); ++j) {
            const T g = grad.empty() ? T(0) : grad[j];
            m[j] = b1 * m[j] + (T(1) - b1) * g;
            v[j] = b2 * v[j] + (T(1) - b2) * g * g;
            const T m_hat = m[j] * inv_bias1;
            const T v_hat = v[j] * inv_bias2;
            values[j] = values[j] * decay - lr * m_hat / (std::sqrt(v_hat) + eps);
        }
    }
}

template AdamWState<float> make_adamw_state(const ParamList<float>&, const AdamWHyper&);
template AdamWState<double> make_adamw_state(const ParamList<double>&, const AdamWHyper&);
template void adamw_step(const ParamList<float>&, AdamWState<float>&);
template void adamw_step(const ParamList<double>&, AdamWState<double>&);

}  // namespace tvdm::numcore
