#include "tvdm/numcore/layers.hpp"

#include <cmath>

namespace tvdm::numcore {

namespace {

template <typename T>
Tensor<T> init_uniform(Shape shape, std::size_t fan_in, Rng& rng, bool zero) {
    if (zero) return Tensor<T>::zeros(std::move(shape), true);
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    return Tensor<T>::uniform(std::move(shape), rng, static_cast<T>(-bound), static_cast<T>(bound), true);
}

}  // namespace

template <typename T>
double max_abs_grad(const ParamList<T>& params) {
    double worst = 0.0;
    for (const auto& p : params) {
        for (T g : p.tensor.grad()) worst = std::max(worst, std::abs(static_cast<double>(g)));
    }
    return worst;
}

template <typename T>
Conv2d<T>::Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, std::size_t stride_, Rng& rng,
                  bool zero_init)
    : stride(stride_), padding(kernel / 2) {
    const std::size_t fan_in = in_channels * kernel * kernel;
    weight = init_uniform<T>({out_channels, in_channels, kernel, kernel}, fan_in, rng, zero_init);
    bias = init_uniform<T>({out_channels}, fan_in, rng, zero_init);
}

template <typename T>
void Conv2d<T>::collect(const std::string& prefix, ParamList<T>& out) const {
    out.push_back({prefix + ".weight", weight});
    out.push_back({prefix + ".bias", bias});
}

template <typename T>
Linear<T>::Linear(std::size_t in_features, std::size_t out_features, Rng& rng, bool zero_init, bool with_bias) {
    weight = init_uniform<T>({out_features, in_features}, in_features, rng, zero_init);
    if (with_bias) bias = init_uniform<T>({out_features}, in_features, rng, zero_init);
}

template <typename T>
void Linear<T>::collect(const std::string& prefix, ParamList<T>& out) const {
    out.push_back({prefix + ".weight", weight});
    if (bias.defined()) out.push_back({prefix + ".bias", bias});
}

template <typename T>
GroupNorm<T>::GroupNorm(std::size_t groups_, std::size_t channels)
    : groups(groups_), gamma(Tensor<T>::full({channels}, T(1), true)), beta(Tensor<T>::zeros({channels}, true)) {}

template <typename T>
void GroupNorm<T>::collect(const std::string& prefix, ParamList<T>& out) const {
    out.push_back({prefix + ".gamma", gamma});
    out.push_back({prefix + ".beta", beta});
}

template <typename T>
LayerNorm<T>::LayerNorm(std::size_t dim)
    : gamma(Tensor<T>::full({dim}, T(1), true)), beta(Tensor<T>::zeros({dim}, true)) {}

template <typename T>
void LayerNorm<T>::collect(const std::string& prefix, ParamList<T>& out) const {
    out.push_back({prefix + ".gamma", gamma});
    out.push_back({prefix + ".beta", beta});
}

template <typename T>
void randomize(const ParamList<T>& params, Rng& rng, double scale) {
    for (const auto& p : params) {
        Tensor<T> handle = p.tensor;
        auto values = handle.mutable_data();
        const double fan = p.tensor.rank() > 1 ? static_cast<double>(p.tensor.numel() / p.tensor.dim(0)) : 1.0;
        const double bound = scale * std::sqrt(3.0 / fan);
        for (auto& v : values) v = static_cast<T>(rng.uniform(-bound, bound));
    }
}

template double max_abs_grad(const ParamList<float>&);
template double max_abs_grad(const ParamList<double>&);
template void randomize(const ParamList<float>&, Rng&, double);
template void randomize(const ParamList<double>&, Rng&, double);
template class Conv2d<float>;
template class Conv2d<double>;
template class Linear<float>;
template class Linear<double>;
template class GroupNorm<float>;
template class GroupNorm<double>;
template class LayerNorm<float>;
template class LayerNorm<double>;

}  // namespace tvdm::numcore
