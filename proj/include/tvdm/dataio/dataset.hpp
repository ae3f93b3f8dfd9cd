#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "tvdm/amcm/boxes.hpp"
#include "tvdm/dataio/io.hpp"
#include "tvdm/dataio/sprites.hpp"

namespace tvdm::dataio {

struct DatasetSpec {
    std::size_t train = 512;
    std::size_t eval = 64;
    std::size_t height = 32;
    std::size_t width = 32;
    std::size_t frames = 8;
    double soft_edge_probability = 0.25;
    std::uint64_t seed = 0;
};

// Sprite videos with their ground-truth boxes; item i of a split is derived from (seed, split, i) only.
std::vector<SpriteVideo> make_sprite_videos(const DatasetSpec& spec, const std::string& split);

// Writes <dir>/<split>/<id>/frame_*.png + boxes.txt for both splits and <dir>/manifest.jsonl.
DatasetManifest write_sprite_dataset(const DatasetSpec& spec, const std::filesystem::path& dir);

// Normalized per-frame boxes of a generated video.
amcm::BoxSequence ground_truth_boxes(const SpriteVideo& video);

struct LoadedSample {
    RGBAVideo video;
    amcm::BoxSequence boxes;
};

// Loads every entry of one split (boxes from the box file, or extracted from alpha when absent).
std::vector<LoadedSample> load_split(const DatasetManifest& manifest, const std::string& split);

}  // namespace tvdm::dataio
