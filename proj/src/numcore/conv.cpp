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

struct ConvGeometry {
    std::size_t batch, cin, h, w, cout, kh, kw, stride, pad, oh, ow;
    std::size_t patch() const { return cin * kh * kw; }
    std::size_t positions() const { return oh * ow; }
};

// cols[(c*kh + i)*kw + j][b*P + p]
template <typename T>
void im2col(const ConvGeometry& g, const T* x, T* cols) {
    const std::size_t P = g.positions();
    const std::size_t stride_row = g.batch * P;
    for (std::size_t c = 0; c < g.cin; ++c) {
        for (std::size_t i = 0; i < g.kh; ++i) {
            for (std::size_t j = 0; j < g.kw; ++j) {
                T* row = cols + ((c * g.kh + i) * g.kw + j) * stride_row;
                for (std::size_t b = 0; b < g.batch; ++b) {
                    const T* plane = x + (b * g.cin + c) * g.h * g.w;
                    T* dst = row + b * P;
                    for (std::size_t oy = 0; oy < g.oh; ++oy) {
                        const long iy = static_cast<long>(oy * g.stride + i) - static_cast<long>(g.pad);
                        for (std::size_t ox = 0; ox < g.ow; ++ox) {
                            const long ix = static_cast<long>(ox * g.stride + j) - static_cast<long>(g.pad);
                            const bool inside = iy >= 0 && ix >= 0 && iy < static_cast<long>(g.h) && ix < static_cast<long>(g.w);
                            dst[oy * g.ow + ox] = inside ? plane[iy * static_cast<long>(g.w) + ix] : T(0);
                        }
                    }
                }
            }
        }
    }
}

template <typename T>
void col2im_add(const ConvGeometry& g, const T* cols, T* gx) {
    const std::size_t P = g.positions();
    const std::size_t stride_row = g.batch * P;
    for (std::size_t c = 0; c < g.cin; ++c) {
        for (std::size_t i = 0; i < g.kh; ++i) {
            for (std::size_t j = 0; j < g.kw; ++j) {
                const T* row = cols + ((c * g.kh + i) * g.kw + j) * stride_row;
                for (std::size_t b = 0; b < g.batch; ++b) {
                    T* plane = gx + (b * g.cin + c) * g.h * g.w;
                    const T* src = row + b * P;
                    for (std::size_t oy = 0; oy < g.oh; ++oy) {
                        const long iy = static_cast<long>(oy * g.stride + i) - static_cast<long>(g.pad);
                        if (iy < 0 || iy >= static_cast<long>(g.h)) continue;
                        for (std::size_t ox = 0; ox < g.ow; ++ox) {
                            const long ix = static_cast<long>(ox * g.stride + j) - static_cast<long>(g.pad);
                            if (ix < 0 || ix >= static_cast<long>(g.w)) continue;
                            plane[iy * static_cast<long>(g.w) + ix] += src[oy * g.ow + ox];
                        }
                    }
                }
            }
        }
    }
}

}  // namespace

template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias, std::size_t stride,
                 std::size_t padding) {
    if (input.rank() != 4) throw ShapeError("conv2d: input must be [B, Cin, H, W], got " + shape_str(input.shape()));
    if (weight.rank() != 4) throw ShapeError("conv2d: weight must be [Cout, Cin, kh, kw], got " + shape_str(weight.shape()));
    if (weight.dim(1) != input.dim(1)) {
        throw ShapeError("conv2d: input channel dimension (dim 1) is " + std::to_string(input.dim(1)) +
                         " but weight expects " + std::to_string(weight.dim(1)));
    }
    if (weight.dim(2) % 2 == 0 || weight.dim(3) % 2 == 0) {
        throw ShapeError("conv2d: kernel extents must be odd, got " + std::to_string(weight.dim(2)) + "x" +
                         std::to_string(weight.dim(3)));
    }
    if (stride != 1 && stride != 2) throw ShapeError("conv2d: stride must be 1 or 2, got " + std::to_string(stride));
    if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != weight.dim(0))) {
        throw ShapeError("conv2d: bias must be [" + std::to_string(weight.dim(0)) + "], got " + shape_str(bias.shape()));
    }
    ConvGeometry g{input.dim(0), input.dim(1), input.dim(2), input.dim(3), weight.dim(0), weight.dim(2), weight.dim(3),
                   stride, padding, 0, 0};
    if (g.h + 2 * g.pad < g.kh) throw ShapeError("conv2d: input height (dim 2) smaller than kernel");
    if (g.w + 2 * g.pad < g.kw) throw ShapeError("conv2d: input width (dim 3) smaller than kernel");
    g.oh = (g.h + 2 * g.pad - g.kh) / g.stride + 1;
    g.ow = (g.w + 2 * g.pad - g.kw) / g.stride + 1;

    const std::size_t K = g.patch();
    const std::size_t BP = g.batch * g.positions();
    RowMat<T> cols(K, BP);
    im2col(g, input.data().data(), cols.data());
    Eigen::Map<const RowMat<T>> Wm(weight.data().data(), g.cout, K);
    RowMat<T> Y = Wm * cols;
    if (bias.defined()) {
        Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> bv(bias.data().data(), g.cout);
        Y.colwise() += bv;
    }
    // [Cout, B*P] -> [B, Cout, P]
    const std::size_t P = g.positions();
    std::vector<T> out(g.batch * g.cout * P);
    for (std::size_t co = 0; co < g.cout; ++co) {
        for (std::size_t b = 0; b < g.batch; ++b) {
            std::copy_n(Y.data() + co * BP + b * P, P, out.data() + (b * g.cout + co) * P);
        }
    }
    return make_result<T>("conv2d", Shape{g.batch, g.cout, g.oh, g.ow}, std::move(out), {input, weight, bias},
                          [input, weight, bias, g](Node<T>& self) {
                              const std::size_t K = g.patch();
                              const std::size_t P = g.positions();
                              const std::size_t BP = g.batch * P;
                              RowMat<T> G(g.cout, BP);
                              for (std::size_t co = 0; co < g.cout; ++co) {
                                  for (std::size_t b = 0; b < g.batch; ++b) {
                                      std::copy_n(self.grad.data() + (b * g.cout + co) * P, P, G.data() + co * BP + b * P);
                                  }
                              }
                              if (T* gw = grad_of(weight)) {
                                  RowMat<T> cols(K, BP);
                                  im2col(g, input.data().data(), cols.data());
                                  Eigen::Map<RowMat<T>>(gw, g.cout, K).noalias() += G * cols.transpose();
                              }
                              if (T* gb = grad_of(bias)) {
                                  for (std::size_t o = 0; o < g.cout; ++o) {
                                      T acc = T(0);
                                      for (Eigen::Index k = 0; k < G.cols(); ++k) acc += G(static_cast<Eigen::Index>(o), k);
                                      gb[o] += acc;
                                  }
                              }
                              if (T* gx = grad_of(input)) {
                                  Eigen::Map<const RowMat<T>> Wm(weight.data().data(), g.cout, K);
                                  RowMat<T> dcols = Wm.transpose() * G;
                                  col2im_add(g, dcols.data(), gx);
                              }
                          });
}

template <typename T>
Tensor<T> upsample_nearest(const Tensor<T>& x, std::size_t factor) {
    if (x.rank() != 4) throw ShapeError("upsample_nearest: expected [B, C, H, W]");
    if (factor == 0) throw ShapeError("upsample_nearest: factor must be positive");
    const std::size_t planes = x.dim(0) * x.dim(1), h = x.dim(2), w = x.dim(3);
    const std::size_t oh = h * factor, ow = w * factor;
    const auto in = x.data();
    std::vector<T> out(planes * oh * ow);
    for (std::size_t p = 0; p < planes; ++p) {
        for (std::size_t y = 0; y < oh; ++y) {
            for (std::size_t xx = 0; xx < ow; ++xx) {
                out[(p * oh + y) * ow + xx] = in[(p * h + y / factor) * w + xx / factor];
            }
        }
    }
    return make_result<T>("upsample_nearest", Shape{x.dim(0), x.dim(1), oh, ow}, std::move(out), {x},
                          [x, planes, h, w, oh, ow, factor](Node<T>& self) {
                              T* gx = grad_of(x);
                              for (std::size_t p = 0; p < planes; ++p) {
                                  for (std::size_t y = 0; y < oh; ++y) {
                                      for (std::size_t xx = 0; xx < ow; ++xx) {
                                          gx[(p * h + y / factor) * w + xx / factor] += self.grad[(p * oh + y) * ow + xx];
                                      }
                                  }
                              }
                          });
}

namespace {

struct Tap {
    std::size_t i0, i1;
    double frac;
};

std::vector<Tap> bilinear_taps(std::size_t in, std::size_t out) {
    std::vector<Tap> taps(out);
    const double ratio = static_cast<double>(in) / static_cast<double>(out);
    for (std::size_t o = 0; o < out; ++o) {
        double src = (static_cast<double>(o) + 0.5) * ratio - 0.5;
        src = std::max(src, 0.0);
        auto i0 = static_cast<std::size_t>(std::floor(src));
        i0 = std::min(i0, in - 1);
        const std::size_t i1 = std::min(i0 + 1, in - 1);
        taps[o] = {i0, i1, src - static_cast<double>(i0)};
    }
    return taps;
}

}  // namespace

template <typename T>
Tensor<T> upsample_bilinear(const Tensor<T>& x, std::size_t out_h, std::size_t out_w) {
    if (x.rank() != 4) throw ShapeError("upsample_bilinear: expected [B, C, H, W]");
    const std::size_t planes = x.dim(0) * x.dim(1), h = x.dim(2), w = x.dim(3);
    auto ty = bilinear_taps(h, out_h);
    auto tx = bilinear_taps(w, out_w);
    const auto in = x.data();
    std::vector<T> out(planes * out_h * out_w);
    for (std::size_t p = 0; p < planes; ++p) {
        const T* plane = in.data() + p * h * w;
        for (std::size_t y = 0; y < out_h; ++y) {
            const T fy = static_cast<T>(ty[y].frac);
            for (std::size_t xx = 0; xx < out_w; ++xx) {
                const T fx = static_cast<T>(tx[xx].frac);
                const T top = plane[ty[y].i0 * w + tx[xx].i0] * (T(1) - fx) + plane[ty[y].i0 * w + tx[xx].i1] * fx;
                const T bot = plane[ty[y].i1 * w + tx[xx].i0] * (T(1) - fx) + plane[ty[y].i1 * w + tx[xx].i1] * fx;
                out[(p * out_h + y) * out_w + xx] = top * (T(1) - fy) + bot * fy;
            }
        }
    }
    return make_result<T>("upsample_bilinear", Shape{x.dim(0), x.dim(1), out_h, out_w}, std::move(out), {x},
                          [x, planes, h, w, out_h, out_w, ty = std::move(ty), tx = std::move(tx)](Node<T>& self) {
                              T* gx = grad_of(x);
                              for (std::size_t p = 0; p < planes; ++p) {
                                  T* plane = gx + p * h * w;
                                  for (std::size_t y = 0; y < out_h; ++y) {
                                      const T fy = static_cast<T>(ty[y].frac);
                                      for (std::size_t xx = 0; xx < out_w; ++xx) {
                                          const T fx = static_cast<T>(tx[xx].frac);
                                          const T g = self.grad[(p * out_h + y) * out_w + xx];
                                          plane[ty[y].i0 * w + tx[xx].i0] += g * (T(1) - fy) * (T(1) - fx);
                                          plane[ty[y].i0 * w + tx[xx].i1] += g * (T(1) - fy) * fx;
                                          plane[ty[y].i1 * w + tx[xx].i0] += g * fy * (T(1) - fx);
                                          plane[ty[y].i1 * w + tx[xx].i1] += g * fy * fx;
                                      }
                                  }
                              }
                          });
}

#define TVDM_INSTANTIATE(T)                                                                                      \
    template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, std::size_t, std::size_t); \
    template Tensor<T> upsample_nearest(const Tensor<T>&, std::size_t);                                         \
    template Tensor<T> upsample_bilinear(const Tensor<T>&, std::size_t, std::size_t);

TVDM_INSTANTIATE(float)
TVDM_INSTANTIATE(double)

#undef TVDM_INSTANTIATE

}  // namespace tvdm::numcore
