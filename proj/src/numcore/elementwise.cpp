#include <algorithm>
#include <cmath>

#include "op_builder.hpp"
#include "tvdm/numcore/ops.hpp"

namespace tvdm::numcore {

using detail::grad_of;
using detail::make_result;

namespace {

template <typename T>
void require_same_shape(const char* op, const Tensor<T>& a, const Tensor<T>& b) {
    if (a.rank() != b.rank()) {
        throw ShapeError(std::string(op) + ": rank mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    }
    for (std::size_t i = 0; i < a.rank(); ++i) {
        if (a.dim(i) != b.dim(i)) {
            throw ShapeError(std::string(op) + ": dimension " + std::to_string(i) + " differs (" +
                             std::to_string(a.dim(i)) + " vs " + std::to_string(b.dim(i)) + ")");
        }
    }
}

template <typename T>
T sigmoid_scalar(T x) {
    return T(1) / (T(1) + std::exp(-x));
}

}  // namespace

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
    require_same_shape("add", a, b);
    const auto n = a.numel();
    std::vector<T> out(n);
    const auto x = a.data();
    const auto y = b.data();
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + y[i];
    return make_result<T>("add", a.shape(), std::move(out), {a, b}, [a, b](Node<T>& self) {
        const T* g = self.grad.data();
        const std::size_t n = self.grad.size();
        if (T* ga = grad_of(a)) for (std::size_t i = 0; i < n; ++i) ga[i] += g[i];
        if (T* gb = grad_of(b)) for (std::size_t i = 0; i < n; ++i) gb[i] += g[i];
    });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
    require_same_shape("sub", a, b);
    const auto n = a.numel();
    std::vector<T> out(n);
    const auto x = a.data();
    const auto y = b.data();
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - y[i];
    return make_result<T>("sub", a.shape(), std::move(out), {a, b}, [a, b](Node<T>& self) {
        const T* g = self.grad.data();
        const std::size_t n = self.grad.size();
        if (T* ga = grad_of(a)) for (std::size_t i = 0; i < n; ++i) ga[i] += g[i];
        if (T* gb = grad_of(b)) for (std::size_t i = 0; i < n; ++i) gb[i] -= g[i];
    });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
    require_same_shape("mul", a, b);
    const auto n = a.numel();
    std::vector<T> out(n);
    const auto x = a.data();
    const auto y = b.data();
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
    return make_result<T>("mul", a.shape(), std::move(out), {a, b}, [a, b](Node<T>& self) {
        const T* g = self.grad.data();
        const std::size_t n = self.grad.size();
        const auto x = a.data();
        const auto y = b.data();
        if (T* ga = grad_of(a)) for (std::size_t i = 0; i < n; ++i) ga[i] += g[i] * y[i];
        if (T* gb = grad_of(b)) for (std::size_t i = 0; i < n; ++i) gb[i] += g[i] * x[i];
    });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
    std::vector<T> out(a.values());
    for (auto& v : out) v *= factor;
    return make_result<T>("scale", a.shape(), std::move(out), {a}, [a, factor](Node<T>& self) {
        T* ga = grad_of(a);
        for (std::size_t i = 0; i < self.grad.size(); ++i) ga[i] += factor * self.grad[i];
    });
}

template <typename T>
Tensor<T> add_scalar(const Tensor<T>& a, T value) {
    std::vector<T> out(a.values());
    for (auto& v : out) v += value;
    return make_result<T>("add_scalar", a.shape(), std::move(out), {a}, [a](Node<T>& self) {
        T* ga = grad_of(a);
        for (std::size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i];
    });
}

template <typename T>
Tensor<T> silu(const Tensor<T>& a) {
    const auto x = a.data();
    std::vector<T> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * sigmoid_scalar(x[i]);
    return make_result<T>("silu", a.shape(), std::move(out), {a}, [a](Node<T>& self) {
        T* ga = grad_of(a);
        const auto x = a.data();
        for (std::size_t i = 0; i < x.size(); ++i) {
            const T s = sigmoid_scalar(x[i]);
            ga[i] += self.grad[i] * (s + x[i] * s * (T(1) - s));
        }
    });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& a) {
    const auto x = a.data();
    std::vector<T> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = sigmoid_scalar(x[i]);
    auto result = make_result<T>("sigmoid", a.shape(), std::move(out), {a}, [a](Node<T>& self) {
        T* ga = grad_of(a);
        for (std::size_t i = 0; i < self.data.size(); ++i) {
            const T s = self.data[i];
            ga[i] += self.grad[i] * s * (T(1) - s);
        }
    });
    return result;
}

template <typename T>
Tensor<T> exp(const Tensor<T>& a) {
    const auto x = a.data();
    std::vector<T> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::exp(x[i]);
    return make_result<T>("exp", a.shape(), std::move(out), {a}, [a](Node<T>& self) {
        T* ga = grad_of(a);
        for (std::size_t i = 0; i < self.data.size(); ++i) ga[i] += self.grad[i] * self.data[i];
    });
}

template <typename T>
Tensor<T> square(const Tensor<T>& a) {
    const auto x = a.data();
    std::vector<T> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * x[i];
    return make_result<T>("square", a.shape(), std::move(out), {a}, [a](Node<T>& self) {
        T* ga = grad_of(a);
        const auto x = a.data();
        for (std::size_t i = 0; i < x.size(); ++i) ga[i] += T(2) * x[i] * self.grad[i];
    });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
    T total = T(0);
    for (T v : a.data()) total += v;
    return make_result<T>("sum", Shape{1}, std::vector<T>{total}, {a}, [a](Node<T>& self) {
        T* ga = grad_of(a);
        const T g = self.grad[0];
        for (std::size_t i = 0; i < a.numel(); ++i) ga[i] += g;
    });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
    return scale(sum(a), T(1) / static_cast<T>(a.numel()));
}

template <typename T>
Tensor<T> sum_squared_error(const Tensor<T>& a, const Tensor<T>& b) {
    require_same_shape("sum_squared_error", a, b);
    const auto x = a.data();
    const auto y = b.data();
    T total = T(0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const T d = x[i] - y[i];
        total += d * d;
    }
    return make_result<T>("sum_squared_error", Shape{1}, std::vector<T>{total}, {a, b}, [a, b](Node<T>& self) {
        const T g = self.grad[0];
        const auto x = a.data();
        const auto y = b.data();
        T* ga = grad_of(a);
        T* gb = grad_of(b);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const T d = T(2) * (x[i] - y[i]) * g;
            if (ga) ga[i] += d;
            if (gb) gb[i] -= d;
        }
    });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
    if (numel(shape) != a.numel()) {
        throw ShapeError("reshape: cannot view " + shape_str(a.shape()) + " as " + shape_str(shape));
    }
    return make_result<T>("reshape", std::move(shape), a.values(), {a}, [a](Node<T>& self) {
        T* ga = grad_of(a);
        for (std::size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i];
    });
}

namespace {

std::vector<std::size_t> strides_of(const Shape& shape) {
    std::vector<std::size_t> strides(shape.size(), 1);
    for (std::size_t i = shape.size(); i-- > 1;) strides[i - 1] = strides[i] * shape[i];
    return strides;
}

// For every output flat index, the source flat index under `order`.
std::vector<std::size_t> permutation_map(const Shape& in_shape, const std::vector<std::size_t>& order) {
    const auto in_strides = strides_of(in_shape);
    Shape out_shape(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) out_shape[i] = in_shape[order[i]];
    const std::size_t n = numel(in_shape);
    std::vector<std::size_t> map(n);
    std::vector<std::size_t> index(order.size(), 0);
    for (std::size_t flat = 0; flat < n; ++flat) {
        std::size_t src = 0;
        for (std::size_t d = 0; d < order.size(); ++d) src += index[d] * in_strides[order[d]];
        map[flat] = src;
        for (std::size_t d = order.size(); d-- > 0;) {
            if (++index[d] < out_shape[d]) break;
            index[d] = 0;
        }
    }
    return map;
}

}  // namespace

template <typename T>
Tensor<T> permute(const Tensor<T>& a, const std::vector<std::size_t>& order) {
    if (order.size() != a.rank()) {
        throw ShapeError("permute: order has " + std::to_string(order.size()) + " axes for rank " +
                         std::to_string(a.rank()));
    }
    std::vector<bool> seen(order.size(), false);
    Shape out_shape(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (order[i] >= order.size() || seen[order[i]]) throw ShapeError("permute: invalid axis order");
        seen[order[i]] = true;
        out_shape[i] = a.dim(order[i]);
    }
    auto map = permutation_map(a.shape(), order);
    const auto x = a.data();
    std::vector<T> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[map[i]];
    return make_result<T>("permute", std::move(out_shape), std::move(out), {a},
                          [a, map = std::move(map)](Node<T>& self) {
                              T* ga = grad_of(a);
                              for (std::size_t i = 0; i < map.size(); ++i) ga[map[i]] += self.grad[i];
                          });
}

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, std::size_t axis) {
    if (parts.empty()) throw ShapeError("concat: no inputs");
    const Shape& first = parts.front().shape();
    if (axis >= first.size()) throw ShapeError("concat: axis out of range");
    Shape out_shape = first;
    out_shape[axis] = 0;
    for (const auto& p : parts) {
        if (p.rank() != first.size()) throw ShapeError("concat: rank mismatch");
        for (std::size_t d = 0; d < first.size(); ++d) {
            if (d != axis && p.dim(d) != first[d]) {
                throw ShapeError("concat: dimension " + std::to_string(d) + " differs (" + std::to_string(p.dim(d)) +
                                 " vs " + std::to_string(first[d]) + ")");
            }
        }
        out_shape[axis] += p.dim(axis);
    }
    std::size_t outer = 1;
    for (std::size_t d = 0; d < axis; ++d) outer *= first[d];
    std::size_t inner = 1;
    for (std::size_t d = axis + 1; d < first.size(); ++d) inner *= first[d];
    const std::size_t out_row = out_shape[axis] * inner;

    std::vector<T> out(numel(out_shape));
    std::size_t offset = 0;
    for (const auto& p : parts) {
        const std::size_t row = p.dim(axis) * inner;
        const auto x = p.data();
        for (std::size_t o = 0; o < outer; ++o) {
            std::copy_n(x.begin() + o * row, row, out.begin() + o * out_row + offset);
        }
        offset += row;
    }
    return make_result<T>("concat", std::move(out_shape), std::move(out), parts,
                          [parts, outer, inner, out_row, axis](Node<T>& self) {
                              std::size_t offset = 0;
                              for (const auto& p : parts) {
                                  const std::size_t row = p.dim(axis) * inner;
                                  if (T* gp = grad_of(p)) {
                                      for (std::size_t o = 0; o < outer; ++o) {
                                          const T* g = self.grad.data() + o * out_row + offset;
                                          T* dst = gp + o * row;
                                          for (std::size_t i = 0; i < row; ++i) dst[i] += g[i];
                                      }
                                  }
                                  offset += row;
                              }
                          });
}

template <typename T>
Tensor<T> slice(const Tensor<T>& a, std::size_t axis, std::size_t begin, std::size_t end) {
    if (axis >= a.rank()) throw ShapeError("slice: axis out of range");
    if (begin >= end || end > a.dim(axis)) {
        throw ShapeError("slice: range [" + std::to_string(begin) + "," + std::to_string(end) + ") invalid for dimension " +
                         std::to_string(axis) + " of size " + std::to_string(a.dim(axis)));
    }
    Shape out_shape = a.shape();
    out_shape[axis] = end - begin;
    std::size_t outer = 1;
    for (std::size_t d = 0; d < axis; ++d) outer *= a.dim(d);
    std::size_t inner = 1;
    for (std::size_t d = axis + 1; d < a.rank(); ++d) inner *= a.dim(d);
    const std::size_t in_row = a.dim(axis) * inner;
    const std::size_t out_row = (end - begin) * inner;
    const std::size_t offset = begin * inner;
    std::vector<T> out(outer * out_row);
    const auto x = a.data();
    for (std::size_t o = 0; o < outer; ++o) {
        std::copy_n(x.begin() + o * in_row + offset, out_row, out.begin() + o * out_row);
    }
    return make_result<T>("slice", std::move(out_shape), std::move(out), {a},
                          [a, outer, in_row, out_row, offset](Node<T>& self) {
                              T* ga = grad_of(a);
                              for (std::size_t o = 0; o < outer; ++o) {
                                  const T* g = self.grad.data() + o * out_row;
                                  T* dst = ga + o * in_row + offset;
                                  for (std::size_t i = 0; i < out_row; ++i) dst[i] += g[i];
                              }
                          });
}

template <typename T>
Tensor<T> repeat_batch(const Tensor<T>& a, std::size_t times) {
    if (times == 0) throw ShapeError("repeat_batch: times must be positive");
    Shape out_shape = a.shape();
    out_shape[0] *= times;
    const std::size_t row = a.numel() / a.dim(0);
    const auto x = a.data();
    std::vector<T> out(a.numel() * times);
    for (std::size_t b = 0; b < a.dim(0); ++b) {
        for (std::size_t r = 0; r < times; ++r) {
            std::copy_n(x.begin() + b * row, row, out.begin() + (b * times + r) * row);
        }
    }
    return make_result<T>("repeat_batch", std::move(out_shape), std::move(out), {a}, [a, times, row](Node<T>& self) {
        T* ga = grad_of(a);
        for (std::size_t b = 0; b < a.dim(0); ++b) {
            for (std::size_t r = 0; r < times; ++r) {
                const T* g = self.grad.data() + (b * times + r) * row;
                for (std::size_t i = 0; i < row; ++i) ga[b * row + i] += g[i];
            }
        }
    });
}

template <typename T>
Tensor<T> add_channel_broadcast(const Tensor<T>& x, const Tensor<T>& v) {
    if (x.rank() < 2 || v.rank() != 2 || v.dim(0) != x.dim(0) || v.dim(1) != x.dim(1)) {
        throw ShapeError("add_channel_broadcast: expected v of shape [" + std::to_string(x.dim(0)) + "," +
                         std::to_string(x.rank() > 1 ? x.dim(1) : 0) + "], got " + shape_str(v.shape()));
    }
    const std::size_t bc = x.dim(0) * x.dim(1);
    const std::size_t inner = x.numel() / bc;
    std::vector<T> out(x.values());
    const auto add = v.data();
    for (std::size_t i = 0; i < bc; ++i) {
        for (std::size_t s = 0; s < inner; ++s) out[i * inner + s] += add[i];
    }
    return make_result<T>("add_channel_broadcast", x.shape(), std::move(out), {x, v}, [x, v, bc, inner](Node<T>& self) {
        const T* g = self.grad.data();
        if (T* gx = grad_of(x)) for (std::size_t i = 0; i < self.grad.size(); ++i) gx[i] += g[i];
        if (T* gv = grad_of(v)) {
            for (std::size_t i = 0; i < bc; ++i) {
                T acc = T(0);
                for (std::size_t s = 0; s < inner; ++s) acc += g[i * inner + s];
                gv[i] += acc;
            }
        }
    });
}

#define TVDM_INSTANTIATE(T)                                                                          \
    template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                      \
    template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                                      \
    template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                                      \
    template Tensor<T> scale(const Tensor<T>&, T);                                                   \
    template Tensor<T> add_scalar(const Tensor<T>&, T);                                              \
    template Tensor<T> silu(const Tensor<T>&);                                                       \
    template Tensor<T> sigmoid(const Tensor<T>&);                                                    \
    template Tensor<T> exp(const Tensor<T>&);                                                        \
    template Tensor<T> square(const Tensor<T>&);                                                     \
    template Tensor<T> sum(const Tensor<T>&);                                                        \
    template Tensor<T> mean(const Tensor<T>&);                                                       \
    template Tensor<T> sum_squared_error(const Tensor<T>&, const Tensor<T>&);                        \
    template Tensor<T> reshape(const Tensor<T>&, Shape);                                             \
    template Tensor<T> permute(const Tensor<T>&, const std::vector<std::size_t>&);                   \
    template Tensor<T> concat(const std::vector<Tensor<T>>&, std::size_t);                           \
    template Tensor<T> slice(const Tensor<T>&, std::size_t, std::size_t, std::size_t);               \
    template Tensor<T> repeat_batch(const Tensor<T>&, std::size_t);                                  \
    template Tensor<T> add_channel_broadcast(const Tensor<T>&, const Tensor<T>&);

TVDM_INSTANTIATE(float)
TVDM_INSTANTIATE(double)

#undef TVDM_INSTANTIATE

}  // namespace tvdm::numcore
