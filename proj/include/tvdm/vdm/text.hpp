#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tvdm/numcore/layers.hpp"

namespace tvdm::vdm {

using numcore::ParamList;
using numcore::Rng;
using numcore::Tensor;

inline constexpr std::size_t kTextSlots = 256;
inline constexpr std::size_t kTextDim = 64;

std::vector<std::string> tokenize(const std::string& prompt);
// FNV-1a of the token, folded into [0, kTextSlots).
std::size_t token_slot(const std::string& token);

// Stand-in prompt encoder: hashed tokens index a learned table, the rows are mean-pooled.
template <typename T>
class TextEmbedder {
public:
    TextEmbedder() = default;
    explicit TextEmbedder(Rng& rng);

    // [B, kTextDim]. An empty prompt maps to the zero vector.
    Tensor<T> operator()(const std::vector<std::string>& prompts) const;
    void collect(const std::string& prefix, ParamList<T>& out) const;

    Tensor<T> table;  // [kTextSlots, kTextDim]
};

}  // namespace tvdm::vdm
