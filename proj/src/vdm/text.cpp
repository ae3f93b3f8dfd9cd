#include "tvdm/vdm/text.hpp"

#include <cctype>

#include "tvdm/numcore/ops.hpp"

namespace tvdm::vdm {

using namespace numcore;

std::vector<std::string> tokenize(const std::string& prompt) {
    std::vector<std::string> tokens;
    std::string tok;
    for (char ch : prompt + ' ') {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            tok += static_cast<char>(std::tolower(c));
        } else if (!tok.empty()) {
            tokens.push_back(std::move(tok));
            tok.clear();
        }
    }
    return tokens;
}

std::size_t token_slot(const std::string& token) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : token) h = (h ^ c) * 1099511628211ULL;
    h ^= h >> 32;
    return static_cast<std::size_t>(h % kTextSlots);
}

template <typename T>
TextEmbedder<T>::TextEmbedder(Rng& rng) : table(Tensor<T>::randn({kTextSlots, kTextDim}, rng, T(1), true)) {}

template <typename T>
Tensor<T> TextEmbedder<T>::operator()(const std::vector<std::string>& prompts) const {
    std::vector<T> weights(prompts.size() * kTextSlots, T(0));
    for (std::size_t b = 0; b < prompts.size(); ++b) {
        const auto tokens = tokenize(prompts[b]);
        for (const auto& tok : tokens) weights[b * kTextSlots + token_slot(tok)] += T(1) / static_cast<T>(tokens.size());
    }
    const Tensor<T> pool({1, prompts.size(), kTextSlots}, std::move(weights));
    return reshape(matmul(pool, reshape(table, {1, kTextSlots, kTextDim})), {prompts.size(), kTextDim});
}

template <typename T>
void TextEmbedder<T>::collect(const std::string& prefix, ParamList<T>& out) const {
    out.push_back({prefix + ".table", table});
}

template class TextEmbedder<float>;
template class TextEmbedder<double>;

}  // namespace tvdm::vdm
