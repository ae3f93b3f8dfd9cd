#include "tvdm/numcore/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tvdm::numcore {

namespace {

double evaluate(const std::function<Tensor<double>()>& f) {
    NoGradGuard guard;
    const auto y = f();
    if (y.numel() != 1) throw ShapeError("grad_check: function must return a scalar, got " + shape_str(y.shape()));
    return y.item();
}

}  // namespace

GradCheckResult grad_check(const std::function<Tensor<double>()>& f, const std::vector<Tensor<double>>& inputs,
                           const GradCheckOptions& options) {
    for (auto input : inputs) {
        input.set_requires_grad(true);
        input.zero_grad();
    }
    const double first = evaluate(f);
    const double second = evaluate(f);
    if (first != second) {
        throw GradCheckError("grad_check: function is not deterministic (" + std::to_string(first) + " vs " +
                             std::to_string(second) + ")");
    }

    const auto y = f();
    y.backward();

    Rng rng(options.seed);
    GradCheckResult result;
    const double h = options.step;
    for (auto input : inputs) {
        std::vector<std::size_t> indices(input.numel());
        std::iota(indices.begin(), indices.end(), std::size_t{0});
        if (options.max_elements_per_input != 0 && indices.size() > options.max_elements_per_input) {
            std::shuffle(indices.begin(), indices.end(), rng.engine());
            indices.resize(options.max_elements_per_input);
        }
        const std::vector<double> analytic = input.has_grad() ? std::vector<double>(input.grad().begin(), input.grad().end())
                                                              : std::vector<double>(input.numel(), 0.0);
        auto values = input.mutable_data();
        for (std::size_t idx : indices) {
            const double saved = values[idx];
            values[idx] = saved + h;
            const double plus = evaluate(f);
            values[idx] = saved - h;
            const double minus = evaluate(f);
            values[idx] = saved;
            const double numeric = (plus - minus) / (2.0 * h);
            const double denom = std::max({1.0, std::abs(analytic[idx]), std::abs(numeric)});
            result.max_rel_error = std::max(result.max_rel_error, std::abs(analytic[idx] - numeric) / denom);
            ++result.elements_checked;
        }
    }
    return result;
}

}  // namespace tvdm::numcore
