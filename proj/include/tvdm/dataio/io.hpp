#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tvdm/dataio/rgba.hpp"

namespace tvdm::dataio {

// Writes frame_0000.png ... (8-bit straight RGBA) and meta.json {fps, caption, frames} into dir.
void save_rgba_sequence(const RGBAVideo& video, const std::filesystem::path& dir);
// Throws IoError on a gap in the frame numbering or unreadable files, ShapeError on mixed sizes.
RGBAVideo load_rgba_sequence(const std::filesystem::path& dir);

// Single 8-bit RGBA PNG.
RGBAImage load_rgba_image(const std::filesystem::path& file);
void save_rgba_image(const RGBAImage& image, const std::filesystem::path& file);

RGBAImage premultiply(const RGBAImage& image);
// rgb / alpha where alpha > 0; rgb = 0 where alpha = 0.
RGBAImage unpremultiply(const RGBAImage& image);

struct ManifestEntry {
    std::string id;
    std::string path;  // video directory, relative to the manifest's directory unless absolute
    std::size_t frames = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    std::string caption;
    std::string boxes_path;  // same resolution rule as path
    std::string split;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::filesystem::path root;  // directory relative paths resolve against

    std::filesystem::path video_dir(const ManifestEntry& e) const;
    std::filesystem::path boxes_file(const ManifestEntry& e) const;
    std::vector<ManifestEntry> split(const std::string& name) const;

    // One JSON object per line.
    void save(const std::filesystem::path& file) const;
    // Checks that ids are unique, each path exists and no id appears in two splits.
    static DatasetManifest load(const std::filesystem::path& file);
};

struct FilterOptions {
    std::size_t min_resolution = 16;  // desk default; 100 at paper scale
};

inline constexpr const char* kRuleUnreadable = "unreadable";
inline constexpr const char* kRuleMinResolution = "min-resolution";
inline constexpr const char* kRuleWhiteAlpha = "white-alpha";

struct FilterReport {
    std::size_t input = 0;
    std::size_t retained = 0;
    std::map<std::string, std::size_t> removed;     // rule -> count
    std::vector<std::pair<std::string, std::string>> dropped;  // (id, rule)
};

// Rule that removes this video, if any. Rules are checked in the order min-resolution, white-alpha.
std::optional<std::string> filter_rule(const RGBAVideo& video, const FilterOptions& options = {});

// Loads every entry; unreadable entries are dropped and logged, not fatal.
std::pair<DatasetManifest, FilterReport> filter_dataset(const DatasetManifest& manifest,
                                                        const FilterOptions& options = {});

}  // namespace tvdm::dataio
