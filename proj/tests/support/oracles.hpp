#pragma once

// Reference implementations used only by tests. They share no code with the library kernels.

#include <cmath>
#include <cstddef>
#include <vector>

namespace tvdm::testing {

// Direct 7-loop cross-correlation over NCHW.
inline std::vector<double> naive_conv2d(const std::vector<double>& x, std::size_t batch, std::size_t cin, std::size_t h,
                                        std::size_t w, const std::vector<double>& weight, std::size_t cout,
                                        std::size_t kh, std::size_t kw, const std::vector<double>& bias,
                                        std::size_t stride, std::size_t pad, std::size_t& oh, std::size_t& ow) {
    oh = (h + 2 * pad - kh) / stride + 1;
    ow = (w + 2 * pad - kw) / stride + 1;
    std::vector<double> out(batch * cout * oh * ow, 0.0);
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t co = 0; co < cout; ++co)
            for (std::size_t oy = 0; oy < oh; ++oy)
                for (std::size_t ox = 0; ox < ow; ++ox) {
                    double acc = bias.empty() ? 0.0 : bias[co];
                    for (std::size_t ci = 0; ci < cin; ++ci)
                        for (std::size_t i = 0; i < kh; ++i)
                            for (std::size_t j = 0; j < kw; ++j) {
                                const long iy = static_cast<long>(oy * stride + i) - static_cast<long>(pad);
                                const long ix = static_cast<long>(ox * stride + j) - static_cast<long>(pad);
                                if (iy < 0 || ix < 0 || iy >= static_cast<long>(h) || ix >= static_cast<long>(w)) continue;
                                acc += x[((b * cin + ci) * h + static_cast<std::size_t>(iy)) * w + static_cast<std::size_t>(ix)] *
                                       weight[((co * cin + ci) * kh + i) * kw + j];
                            }
                    out[((b * cout + co) * oh + oy) * ow + ox] = acc;
                }
    return out;
}

// Per-element softmax(q k^T / sqrt(D)) v for [B, L, D] operands.
inline std::vector<double> naive_attention(const std::vector<double>& q, const std::vector<double>& k,
                                           const std::vector<double>& v, std::size_t batch, std::size_t len,
                                           std::size_t dim) {
    std::vector<double> out(batch * len * dim, 0.0);
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t i = 0; i < len; ++i) {
            std::vector<double> scores(len);
            double peak = -1e300;
            for (std::size_t j = 0; j < len; ++j) {
                double s = 0.0;
                for (std::size_t d = 0; d < dim; ++d) s += q[(b * len + i) * dim + d] * k[(b * len + j) * dim + d];
                scores[j] = s / std::sqrt(static_cast<double>(dim));
                peak = std::max(peak, scores[j]);
            }
            double total = 0.0;
            for (auto& s : scores) {
                s = std::exp(s - peak);
                total += s;
            }
            for (std::size_t j = 0; j < len; ++j)
                for (std::size_t d = 0; d < dim; ++d)
                    out[(b * len + i) * dim + d] += scores[j] / total * v[(b * len + j) * dim + d];
        }
    return out;
}

}  // namespace tvdm::testing
