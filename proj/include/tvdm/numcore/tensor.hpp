#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tvdm/numcore/rng.hpp"

namespace tvdm::numcore {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

// One vertex of the reverse-mode graph. Leaves (parameters, inputs) have no backward_fn.
template <typename T>
struct Node {
    Shape shape;
    std::vector<T> data;
    std::vector<T> grad;  // empty until the first accumulation
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward_fn;

    T* grad_buffer() {
        if (grad.empty()) {
            grad.assign(data.size(), T(0));
        }
        return grad.data();
    }
};

// Shared handle to a graph node. Copies alias the same node; values of non-leaf tensors
// are never modified after construction.
template <typename T>
class Tensor {
public:
    using value_type = T;

    Tensor() = default;
    Tensor(Shape shape, std::vector<T> data, bool requires_grad = false);
    explicit Tensor(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, T value, bool requires_grad = false);
    static Tensor scalar(T value, bool requires_grad = false);
    static Tensor randn(Shape shape, Rng& rng, T stddev = T(1), bool requires_grad = false);
    static Tensor uniform(Shape shape, Rng& rng, T lo, T hi, bool requires_grad = false);

    bool defined() const noexcept { return node_ != nullptr; }
    const Shape& shape() const { return node_->shape; }
    std::size_t rank() const { return node_->shape.size(); }
    std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }
    std::size_t numel() const { return node_->data.size(); }

    std::span<const T> data() const { return node_->data; }
    // Direct write access. Only valid for leaves (initialization, optimizer updates).
    std::span<T> mutable_data() { return node_->data; }
    const std::vector<T>& values() const { return node_->data; }

    bool has_grad() const { return !node_->grad.empty(); }
    // Empty span when no gradient has been accumulated.
    std::span<const T> grad() const { return node_->grad; }
    std::span<T> mutable_grad() { return {node_->grad_buffer(), node_->data.size()}; }
    void zero_grad();

    bool requires_grad() const { return node_->requires_grad; }
    void set_requires_grad(bool value) { node_->requires_grad = value; }

    T item() const;
    // Reverse pass from a single-element tensor; gradients are added into every reachable node.
    void backward() const;
    // Same values, cut from the graph.
    Tensor detach() const;
    bool all_finite() const;

    template <typename U>
    Tensor<U> cast() const {
        std::vector<U> out(node_->data.begin(), node_->data.end());
        return Tensor<U>(node_->shape, std::move(out));
    }

    Node<T>* node() const { return node_.get(); }
    const std::shared_ptr<Node<T>>& node_ptr() const { return node_; }

private:
    std::shared_ptr<Node<T>> node_;
};

// Disables graph construction on this thread while alive.
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool previous_;
};

bool grad_enabled();

// When on, every op checks its output for NaN/Inf and throws NumericError.
void set_finite_checks(bool enabled);
bool finite_checks_enabled();

}  // namespace tvdm::numcore
