#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "op_builder.hpp"
#include "tvdm/numcore/ops.hpp"

namespace tvdm::numcore {

using detail::grad_of;
using detail::make_result;

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapC = Eigen::Map<const RowMat<T>>;
template <typename T>
using MapM = Eigen::Map<RowMat<T>>;

}  // namespace

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b, bool transpose_a, bool transpose_b) {
    if (a.rank() != 3 || b.rank() != 3) {
        throw ShapeError("matmul: expected rank-3 operands, got " + shape_str(a.shape()) + " and " + shape_str(b.shape()));
    }
    if (a.dim(0) != b.dim(0)) {
        throw ShapeError("matmul: batch dimension 0 differs (" + std::to_string(a.dim(0)) + " vs " +
                         std::to_string(b.dim(0)) + ")");
    }
    const std::size_t batch = a.dim(0);
    const std::size_t ar = a.dim(1), ac = a.dim(2), br = b.dim(1), bc = b.dim(2);
    const std::size_t m = transpose_a ? ac : ar;
    const std::size_t k = transpose_a ? ar : ac;
    const std::size_t k2 = transpose_b ? bc : br;
    const std::size_t n = transpose_b ? br : bc;
    if (k != k2) {
        throw ShapeError("matmul: contraction dimension differs (" + std::to_string(k) + " vs " + std::to_string(k2) + ")");
    }
    std::vector<T> out(batch * m * n);
    for (std::size_t i = 0; i < batch; ++i) {
        MapC<T> A(a.data().data() + i * ar * ac, ar, ac);
        MapC<T> B(b.data().data() + i * br * bc, br, bc);
        MapM<T> C(out.data() + i * m * n, m, n);
        if (!transpose_a && !transpose_b) C.noalias() = A * B;
        else if (transpose_a && !transpose_b) C.noalias() = A.transpose() * B;
        else if (!transpose_a && transpose_b) C.noalias() = A * B.transpose();
        else C.noalias() = A.transpose() * B.transpose();
    }
    return make_result<T>(
        "matmul", Shape{batch, m, n}, std::move(out), {a, b},
        [a, b, transpose_a, transpose_b, batch, ar, ac, br, bc, m, n](Node<T>& self) {
            T* ga = grad_of(a);
            T* gb = grad_of(b);
            for (std::size_t i = 0; i < batch; ++i) {
                MapC<T> A(a.data().data() + i * ar * ac, ar, ac);
                MapC<T> B(b.data().data() + i * br * bc, br, bc);
                MapC<T> G(self.grad.data() + i * m * n, m, n);
                if (ga) {
                    MapM<T> GA(ga + i * ar * ac, ar, ac);
                    // d op(A) = G op(B)^T
                    if (!transpose_a) {
                        if (!transpose_b) GA.noalias() += G * B.transpose();
                        else GA.noalias() += G * B;
                    } else {
                        if (!transpose_b) GA.noalias() += B * G.transpose();
                        else GA.noalias() += B.transpose() * G.transpose();
                    }
                }
                if (gb) {
                    MapM<T> GB(gb + i * br * bc, br, bc);
                    // d op(B) = op(A)^T G
                    if (!transpose_b) {
                        if (!transpose_a) GB.noalias() += A.transpose() * G;
                        else GB.noalias() += A * G;
                    } else {
                        if (!transpose_a) GB.noalias() += G.transpose() * A;
                        else GB.noalias() += G.transpose() * A.transpose();
                    }
                }
            }
        });
}

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
    if (weight.rank() != 2) throw ShapeError("linear: weight must be [out, in], got " + shape_str(weight.shape()));
    const std::size_t in = weight.dim(1);
    const std::size_t out_features = weight.dim(0);
    if (x.dim(x.rank() - 1) != in) {
        throw ShapeError("linear: input last dimension (dim " + std::to_string(x.rank() - 1) + ") is " +
                         std::to_string(x.dim(x.rank() - 1)) + " but weight expects " + std::to_string(in));
    }
    if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != out_features)) {
        throw ShapeError("linear: bias must be [" + std::to_string(out_features) + "], got " + shape_str(bias.shape()));
    }
    const std::size_t rows = x.numel() / in;
    Shape out_shape = x.shape();
    out_shape.back() = out_features;
    std::vector<T> out(rows * out_features);
    MapC<T> X(x.data().data(), rows, in);
    MapC<T> W(weight.data().data(), out_features, in);
    MapM<T> Y(out.data(), rows, out_features);
    Y.noalias() = X * W.transpose();
    if (bias.defined()) {
        Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> bv(bias.data().data(), out_features);
        Y.rowwise() += bv;
    }
    return make_result<T>("linear", std::move(out_shape), std::move(out), {x, weight, bias},
                          [x, weight, bias, rows, in, out_features](Node<T>& self) {
                              MapC<T> G(self.grad.data(), rows, out_features);
                              if (T* gx = grad_of(x)) {
                                  MapC<T> W(weight.data().data(), out_features, in);
                                  MapM<T>(gx, rows, in).noalias() += G * W;
                              }
                              if (T* gw = grad_of(weight)) {
                                  MapC<T> X(x.data().data(), rows, in);
                                  MapM<T>(gw, out_features, in).noalias() += G.transpose() * X;
                              }
                              if (T* gbias = grad_of(bias)) {
                                  // Plain loop: Eigen's vectorized reduction order depends on buffer alignment.
                                  const T* g = self.grad.data();
                                  for (std::size_t r = 0; r < rows; ++r)
                                      for (std::size_t o = 0; o < out_features; ++o) gbias[o] += g[r * out_features + o];
                              }
                          });
}

template <typename T>
Tensor<T> softmax_lastdim(const Tensor<T>& a) {
    const std::size_t d = a.dim(a.rank() - 1);
    const std::size_t rows = a.numel() / d;
    const auto x = a.data();
    std::vector<T> out(x.size());
    for (std::size_t r = 0; r < rows; ++r) {
        const T* row = x.data() + r * d;
        T* dst = out.data() + r * d;
        const T peak = *std::max_element(row, row + d);
        T total = T(0);
        for (std::size_t j = 0; j < d; ++j) {
            dst[j] = std::exp(row[j] - peak);
            total += dst[j];
        }
        for (std::size_t j = 0; j < d; ++j) dst[j] /= total;
    }
    return make_result<T>("softmax", a.shape(), std::move(out), {a}, [a, rows, d](Node<T>& self) {
        T* ga = grad_of(a);
        for (std::size_t r = 0; r < rows; ++r) {
            const T* y = self.data.data() + r * d;
            const T* g = self.grad.data() + r * d;
            T dot = T(0);
            for (std::size_t j = 0; j < d; ++j) dot += g[j] * y[j];
            for (std::size_t j = 0; j < d; ++j) ga[r * d + j] += y[j] * (g[j] - dot);
        }
    });
}

template <typename T>
Tensor<T> attention_weights(const Tensor<T>& q, const Tensor<T>& k) {
    if (q.rank() != 3 || k.rank() != 3) throw ShapeError("attention: q and k must be [B, L, D]");
    const std::size_t d = q.dim(2);
    if (d == 0) throw ShapeError("attention: head dimension D must be positive");
    if (k.dim(2) != d) {
        throw ShapeError("attention: key dimension 2 is " + std::to_string(k.dim(2)) + " but query has " + std::to_string(d));
    }
    const T inv_sqrt_d = T(1) / std::sqrt(static_cast<T>(d));
    return softmax_lastdim(scale(matmul(q, k, false, true), inv_sqrt_d));
}

template <typename T>
Tensor<T> scaled_dot_attention(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v) {
    if (v.rank() != 3 || v.dim(0) != k.dim(0) || v.dim(1) != k.dim(1)) {
        throw ShapeError("attention: v must be [B, Lk, Dv] matching k " + shape_str(k.shape()) + ", got " +
                         shape_str(v.shape()));
    }
    return matmul(attention_weights(q, k), v);
}

#define TVDM_INSTANTIATE(T)                                                                   \
    template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&, bool, bool);                \
    template Tensor<T> linear(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);          \
    template Tensor<T> softmax_lastdim(const Tensor<T>&);                                     \
    template Tensor<T> attention_weights(const Tensor<T>&, const Tensor<T>&);                 \
    template Tensor<T> scaled_dot_attention(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);

TVDM_INSTANTIATE(float)
TVDM_INSTANTIATE(double)

#undef TVDM_INSTANTIATE

}  // namespace tvdm::numcore
