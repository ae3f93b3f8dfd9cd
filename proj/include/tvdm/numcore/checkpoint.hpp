#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tvdm/numcore/adamw.hpp"
#include "tvdm/numcore/layers.hpp"

namespace tvdm::numcore {

// On-disk layout (all integers little-endian):
//   "TVDM" | u32 version
//   u32 meta_count   { u32 key_len, key, u32 value_len, value }
//   u32 tensor_count { u32 name_len, name, u32 rank, u64 dims[rank], u64 byte_offset, u64 count }
//   payload: float32 values, byte_offset relative to the payload start
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedArray {
    std::string name;
    Shape shape;
    std::vector<float> values;
};

struct Checkpoint {
    std::map<std::string, std::string> meta;
    std::vector<NamedArray> tensors;

    const NamedArray* find(const std::string& name) const;
    const std::string& meta_at(const std::string& key) const;  // throws IoError when absent

    std::vector<std::uint8_t> serialize() const;
    static Checkpoint deserialize(const std::vector<std::uint8_t>& bytes);

    void save(const std::filesystem::path& path) const;
    static Checkpoint load(const std::filesystem::path& path);
};

template <typename T>
void store_params(Checkpoint& ckpt, const ParamList<T>& params, const std::string& prefix = "");

// Copies values into the existing parameter tensors. Missing names or shape mismatches throw IoError.
template <typename T>
void load_params(const Checkpoint& ckpt, const ParamList<T>& params, const std::string& prefix = "");

template <typename T>
void store_adamw(Checkpoint& ckpt, const ParamList<T>& params, const AdamWState<T>& state, const std::string& prefix);

template <typename T>
AdamWState<T> load_adamw(const Checkpoint& ckpt, const ParamList<T>& params, const std::string& prefix);

}  // namespace tvdm::numcore
