#pragma once

#include <initializer_list>
#include <string>

#include "tvdm/numcore/errors.hpp"
#include "tvdm/numcore/tensor.hpp"

namespace tvdm::numcore::detail {

// Wraps freshly computed values into a graph node. The backward closure is attached only
// when grad mode is on and at least one input requires a gradient.
template <typename T, typename Inputs, typename Backward>
Tensor<T> make_result(const char* op, Shape shape, std::vector<T> values, const Inputs& inputs, Backward&& backward) {
    Tensor<T> out(std::move(shape), std::move(values));
    if (finite_checks_enabled() && !out.all_finite()) {
        throw NumericError(std::string("non-finite value produced by ") + op);
    }
    if (!grad_enabled()) {
        return out;
    }
    bool needs_grad = false;
    for (const auto& in : inputs) {
        if (in.defined() && in.requires_grad()) {
            needs_grad = true;
            break;
        }
    }
    if (!needs_grad) {
        return out;
    }
    Node<T>* node = out.node();
    node->requires_grad = true;
    for (const auto& in : inputs) {
        if (in.defined() && in.requires_grad()) {
            node->parents.push_back(in.node_ptr());
        }
    }
    node->backward_fn = std::forward<Backward>(backward);
    return out;
}

template <typename T, typename Backward>
Tensor<T> make_result(const char* op, Shape shape, std::vector<T> values, std::initializer_list<Tensor<T>> inputs,
                      Backward&& backward) {
    return make_result<T, std::initializer_list<Tensor<T>>, Backward>(op, std::move(shape), std::move(values), inputs,
                                                                      std::forward<Backward>(backward));
}

// Gradient sink of an input, or nullptr when it does not take gradients.
template <typename T>
T* grad_of(const Tensor<T>& t) {
    if (!t.defined() || !t.requires_grad()) return nullptr;
    return t.node()->grad_buffer();
}

}  // namespace tvdm::numcore::detail
