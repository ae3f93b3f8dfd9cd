#pragma once

#include <string>
#include <vector>

#include "tvdm/numcore/ops.hpp"
#include "tvdm/numcore/rng.hpp"
#include "tvdm/numcore/tensor.hpp"

namespace tvdm::numcore {

template <typename T>
struct NamedParam {
    std::string name;
    Tensor<T> tensor;
};

template <typename T>
using ParamList = std::vector<NamedParam<T>>;

template <typename T>
void set_trainable(const ParamList<T>& params, bool trainable) {
    for (const auto& p : params) {
        Tensor<T> handle = p.tensor;
        handle.set_requires_grad(trainable);
    }
}

template <typename T>
void zero_grads(const ParamList<T>& params) {
    for (const auto& p : params) {
        Tensor<T> handle = p.tensor;
        handle.zero_grad();
    }
}

// Largest |g| over every accumulated gradient; 0 when nothing was accumulated.
template <typename T>
double max_abs_grad(const ParamList<T>& params);

template <typename T>
std::size_t parameter_count(const ParamList<T>& params) {
    std::size_t n = 0;
    for (const auto& p : params) n += p.tensor.numel();
    return n;
}

// 2-D convolution with "same" padding for stride 1 (padding = k / 2).
template <typename T>
class Conv2d {
public:
    Conv2d() = default;
    Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, std::size_t stride, Rng& rng,
           bool zero_init = false);

    Tensor<T> operator()(const Tensor<T>& x) const { return conv2d(x, weight, bias, stride, padding); }
    void collect(const std::string& prefix, ParamList<T>& out) const;

    Tensor<T> weight;
    Tensor<T> bias;
    std::size_t stride = 1;
    std::size_t padding = 0;
};

template <typename T>
class Linear {
public:
    Linear() = default;
    Linear(std::size_t in_features, std::size_t out_features, Rng& rng, bool zero_init = false, bool with_bias = true);

    Tensor<T> operator()(const Tensor<T>& x) const { return linear(x, weight, bias); }
    void collect(const std::string& prefix, ParamList<T>& out) const;

    Tensor<T> weight;
    Tensor<T> bias;
};

template <typename T>
class GroupNorm {
public:
    GroupNorm() = default;
    GroupNorm(std::size_t groups, std::size_t channels);

    Tensor<T> operator()(const Tensor<T>& x) const { return group_norm(x, groups, gamma, beta); }
    void collect(const std::string& prefix, ParamList<T>& out) const;

    std::size_t groups = 1;
    Tensor<T> gamma;
    Tensor<T> beta;
};

template <typename T>
class LayerNorm {
public:
    LayerNorm() = default;
    explicit LayerNorm(std::size_t dim);

    Tensor<T> operator()(const Tensor<T>& x) const { return layer_norm(x, gamma, beta); }
    void collect(const std::string& prefix, ParamList<T>& out) const;

    Tensor<T> gamma;
    Tensor<T> beta;
};

// Randomizes every parameter (including zero-initialized ones); used by gradient checks so
// zero-init layers do not mask upstream gradients.
template <typename T>
void randomize(const ParamList<T>& params, Rng& rng, double scale = 0.5);

}  // namespace tvdm::numcore
