#include "tvdm/numcore/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tvdm/numcore/errors.hpp"

namespace tvdm::numcore {

namespace {

constexpr char kMagic[4] = {'T', 'V', 'D', 'M'};

class Writer {
public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes_.insert(bytes_.end(), s.begin(), s.end());
    }
    void raw(const char* data, std::size_t n) { bytes_.insert(bytes_.end(), data, data + n); }
    void f32(float f) { u32(std::bit_cast<std::uint32_t>(f)); }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
};

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
        return v;
    }
    std::string str() {
        const auto n = u32();
        need(n);
        std::string s(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_), bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return s;
    }
    void expect_magic() {
        need(4);
        if (std::memcmp(bytes_.data() + pos_, kMagic, 4) != 0) throw IoError("checkpoint: bad magic, not a TVDM file");
        pos_ += 4;
    }
    std::size_t pos() const { return pos_; }
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) throw IoError("checkpoint: truncated file");
    }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

const NamedArray* Checkpoint::find(const std::string& name) const {
    for (const auto& t : tensors) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

const std::string& Checkpoint::meta_at(const std::string& key) const {
    const auto it = meta.find(key);
    if (it == meta.end()) throw IoError("checkpoint: missing metadata key '" + key + "'");
    return it->second;
}

std::vector<std::uint8_t> Checkpoint::serialize() const {
    Writer w;
    w.raw(kMagic, 4);
    w.u32(kCheckpointVersion);
    w.u32(static_cast<std::uint32_t>(meta.size()));
    for (const auto& [k, v] : meta) {
        w.str(k);
        w.str(v);
    }
    w.u32(static_cast<std::uint32_t>(tensors.size()));
    std::uint64_t offset = 0;
    for (const auto& t : tensors) {
        if (numel(t.shape) != t.values.size()) throw ShapeError("checkpoint: tensor '" + t.name + "' shape/value mismatch");
        w.str(t.name);
        w.u32(static_cast<std::uint32_t>(t.shape.size()));
        for (auto d : t.shape) w.u64(d);
        w.u64(offset);
        w.u64(t.values.size());
        offset += t.values.size() * sizeof(float);
    }
    for (const auto& t : tensors) {
        for (float f : t.values) w.f32(f);
    }
    return w.take();
}

Checkpoint Checkpoint::deserialize(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    r.expect_magic();
    const auto version = r.u32();
    if (version != kCheckpointVersion) {
        throw IoError("checkpoint: unsupported format version " + std::to_string(version));
    }
    Checkpoint ckpt;
    const auto meta_count = r.u32();
    for (std::uint32_t i = 0; i < meta_count; ++i) {
        auto k = r.str();
        ckpt.meta[k] = r.str();
    }
    struct Entry {
        std::uint64_t offset, count;
    };
    std::vector<Entry> entries;
    const auto tensor_count = r.u32();
    for (std::uint32_t i = 0; i < tensor_count; ++i) {
        NamedArray t;
        t.name = r.str();
        const auto rank = r.u32();
        for (std::uint32_t d = 0; d < rank; ++d) t.shape.push_back(static_cast<std::size_t>(r.u64()));
        const auto offset = r.u64();
        const auto count = r.u64();
        if (count != numel(t.shape)) throw IoError("checkpoint: tensor '" + t.name + "' count disagrees with shape");
        entries.push_back({offset, count});
        ckpt.tensors.push_back(std::move(t));
    }
    const std::size_t payload = r.pos();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::size_t begin = payload + entries[i].offset;
        if (begin + entries[i].count * 4 > bytes.size()) throw IoError("checkpoint: payload truncated");
        auto& values = ckpt.tensors[i].values;
        values.resize(entries[i].count);
        for (std::size_t j = 0; j < values.size(); ++j) {
            std::uint32_t bits = 0;
            for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[begin + 4 * j + b]) << (8 * b);
            values[j] = std::bit_cast<float>(bits);
        }
    }
    return ckpt;
}

void Checkpoint::save(const std::filesystem::path& path) const {
    const auto bytes = serialize();
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("checkpoint: cannot write " + tmp);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("checkpoint: write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("checkpoint: cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

template <typename T>
void store_params(Checkpoint& ckpt, const ParamList<T>& params, const std::string& prefix) {
    for (const auto& p : params) {
        ckpt.tensors.push_back({prefix + p.name, p.tensor.shape(),
                                std::vector<float>(p.tensor.data().begin(), p.tensor.data().end())});
    }
}

template <typename T>
void load_params(const Checkpoint& ckpt, const ParamList<T>& params, const std::string& prefix) {
    for (const auto& p : params) {
        const auto* stored = ckpt.find(prefix + p.name);
        if (!stored) throw IoError("checkpoint: missing tensor '" + prefix + p.name + "'");
        if (stored->shape != p.tensor.shape()) {
            throw IoError("checkpoint: tensor '" + prefix + p.name + "' has shape " + shape_str(stored->shape) +
                          ", model expects " + shape_str(p.tensor.shape()));
        }
        Tensor<T> handle = p.tensor;
        auto dst = handle.mutable_data();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<T>(stored->values[i]);
    }
}

namespace {

std::string exact(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

}  // namespace

template <typename T>
void store_adamw(Checkpoint& ckpt, const ParamList<T>& params, const AdamWState<T>& state, const std::string& prefix) {
    ckpt.meta[prefix + "step"] = std::to_string(state.step);
    ckpt.meta[prefix + "lr"] = exact(state.hyper.lr);
    ckpt.meta[prefix + "beta1"] = exact(state.hyper.beta1);
    ckpt.meta[prefix + "beta2"] = exact(state.hyper.beta2);
    ckpt.meta[prefix + "eps"] = exact(state.hyper.eps);
    ckpt.meta[prefix + "weight_decay"] = exact(state.hyper.weight_decay);
    for (std::size_t i = 0; i < params.size(); ++i) {
        ckpt.tensors.push_back({prefix + "m." + params[i].name, params[i].tensor.shape(),
                                std::vector<float>(state.m[i].begin(), state.m[i].end())});
        ckpt.tensors.push_back({prefix + "v." + params[i].name, params[i].tensor.shape(),
                                std::vector<float>(state.v[i].begin(), state.v[i].end())});
    }
}

template <typename T>
AdamWState<T> load_adamw(const Checkpoint& ckpt, const ParamList<T>& params, const std::string& prefix) {
    AdamWHyper hyper;
    hyper.lr = std::stod(ckpt.meta_at(prefix + "lr"));
    hyper.beta1 = std::stod(ckpt.meta_at(prefix + "beta1"));
    hyper.beta2 = std::stod(ckpt.meta_at(prefix + "beta2"));
    hyper.eps = std::stod(ckpt.meta_at(prefix + "eps"));
    hyper.weight_decay = std::stod(ckpt.meta_at(prefix + "weight_decay"));
    auto state = make_adamw_state(params, hyper);
    state.step = std::stoull(ckpt.meta_at(prefix + "step"));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto* m = ckpt.find(prefix + "m." + params[i].name);
        const auto* v = ckpt.find(prefix + "v." + params[i].name);
        if (!m || !v) throw IoError("checkpoint: missing optimizer moments for '" + params[i].name + "'");
        state.m[i].assign(m->values.begin(), m->values.end());
        state.v[i].assign(v->values.begin(), v->values.end());
    }
    return state;
}

template void store_params(Checkpoint&, const ParamList<float>&, const std::string&);
template void store_params(Checkpoint&, const ParamList<double>&, const std::string&);
template void load_params(const Checkpoint&, const ParamList<float>&, const std::string&);
template void load_params(const Checkpoint&, const ParamList<double>&, const std::string&);
template void store_adamw(Checkpoint&, const ParamList<float>&, const AdamWState<float>&, const std::string&);
template AdamWState<float> load_adamw(const Checkpoint&, const ParamList<float>&, const std::string&);

}  // namespace tvdm::numcore
