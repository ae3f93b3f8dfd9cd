#pragma once

#include <cstdint>
#include <vector>

#include "tvdm/numcore/layers.hpp"

namespace tvdm::numcore {

struct AdamWHyper {
    double lr = 3e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;
};

// Moments are kept in the parameter's precision, indexed like the ParamList they were built for.
template <typename T>
struct AdamWState {
    std::uint64_t step = 0;
    AdamWHyper hyper;
    std::vector<std::vector<T>> m;
    std::vector<std::vector<T>> v;
};

template <typename T>
AdamWState<T> make_adamw_state(const ParamList<T>& params, const AdamWHyper& hyper);

// One decoupled-weight-decay Adam update using each parameter's accumulated gradient (missing
// gradients count as zero). Throws NumericError and leaves everything untouched when any
// gradient is non-finite.
template <typename T>
void adamw_step(const ParamList<T>& params, AdamWState<T>& state);

}  // namespace tvdm::numcore
