#include "tvdm/dataio/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <regex>
#include <set>

#include "json.hpp"
#include "tvdm/numcore/errors.hpp"

namespace tvdm::dataio {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string frame_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%04zu.png", i);
    return buf;
}

std::uint8_t quantize(float v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)); }

void write_png(const fs::path& file, const RGBAImage& img) {
    std::vector<std::uint8_t> buf(img.pixels() * 4);
    for (std::size_t p = 0; p < img.pixels(); ++p) {
        for (std::size_t c = 0; c < 3; ++c) buf[p * 4 + c] = quantize(img.rgb[p * 3 + c]);
        buf[p * 4 + 3] = quantize(img.alpha[p]);
    }
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = PNG_FORMAT_RGBA;
    if (!png_image_write_to_file(&image, file.c_str(), 0, buf.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw IoError("cannot write " + file.string() + ": " + msg);
    }
}

RGBAImage read_png(const fs::path& file) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, file.c_str())) {
        throw IoError("cannot read " + file.string() + ": " + image.message);
    }
    image.format = PNG_FORMAT_RGBA;
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw IoError("cannot decode " + file.string() + ": " + msg);
    }
    RGBAImage img(image.height, image.width);
    for (std::size_t p = 0; p < img.pixels(); ++p) {
        for (std::size_t c = 0; c < 3; ++c) img.rgb[p * 3 + c] = buf[p * 4 + c] / 255.0f;
        img.alpha[p] = buf[p * 4 + 3] / 255.0f;
    }
    return img;
}

fs::path resolve(const fs::path& root, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : root / path;
}

}  // namespace

void save_rgba_sequence(const RGBAVideo& video, const fs::path& dir) {
    video.validate();
    fs::create_directories(dir);
    for (std::size_t i = 0; i < video.frames.size(); ++i) write_png(dir / frame_name(i), video.frames[i]);
    json meta{{"fps", video.fps}, {"caption", video.caption}, {"frames", video.frames.size()}};
    std::ofstream out(dir / "meta.json");
    if (!out) throw IoError("cannot write " + (dir / "meta.json").string());
    out << meta.dump(2) << '\n';
}

RGBAVideo load_rgba_sequence(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("not a frame directory: " + dir.string());
    static const std::regex pattern(R"(frame_(\d+)\.png)");
    std::vector<std::pair<std::size_t, fs::path>> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::smatch m;
        const std::string name = entry.path().filename().string();
        if (std::regex_match(name, m, pattern)) files.emplace_back(std::stoul(m[1].str()), entry.path());
    }
    std::sort(files.begin(), files.end());
    RGBAVideo video;
    std::size_t expected_frames = 0;
    const auto meta_path = dir / "meta.json";
    if (fs::exists(meta_path)) {
        std::ifstream in(meta_path);
        try {
            const json meta = json::parse(in);
            video.fps = meta.value("fps", 8);
            video.caption = meta.value("caption", std::string());
            expected_frames = meta.value("frames", std::size_t{0});
        } catch (const json::exception& e) {
            throw IoError("malformed " + meta_path.string() + ": " + e.what());
        }
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (files[i].first != i) {
            throw IoError("frame sequence " + dir.string() + " is missing " + frame_name(i) + " (found " +
                          files[i].second.filename().string() + ")");
        }
    }
    if (files.size() < expected_frames) {
        throw IoError("frame sequence " + dir.string() + " is missing " + frame_name(files.size()) + " (meta.json lists " +
                      std::to_string(expected_frames) + " frames)");
    }
    if (files.empty()) throw IoError("no frames in " + dir.string());
    for (const auto& [index, path] : files) {
        auto img = read_png(path);
        if (!video.frames.empty() &&
            (img.height != video.frames.front().height || img.width != video.frames.front().width)) {
            throw ShapeError("frame sequence " + dir.string() + ": " + path.filename().string() + " is " +
                             std::to_string(img.width) + "x" + std::to_string(img.height) + ", expected " +
                             std::to_string(video.width()) + "x" + std::to_string(video.height()));
        }
        video.frames.push_back(std::move(img));
    }
    return video;
}

RGBAImage load_rgba_image(const fs::path& file) { return read_png(file); }

void save_rgba_image(const RGBAImage& image, const fs::path& file) {
    image.validate();
    write_png(file, image);
}

RGBAImage premultiply(const RGBAImage& image) {
    RGBAImage out = image;
    for (std::size_t p = 0; p < image.pixels(); ++p) {
        for (std::size_t c = 0; c < 3; ++c) out.rgb[p * 3 + c] = image.rgb[p * 3 + c] * image.alpha[p];
    }
    return out;
}

RGBAImage unpremultiply(const RGBAImage& image) {
    RGBAImage out = image;
    for (std::size_t p = 0; p < image.pixels(); ++p) {
        const float a = image.alpha[p];
        for (std::size_t c = 0; c < 3; ++c) out.rgb[p * 3 + c] = a > 0.0f ? image.rgb[p * 3 + c] / a : 0.0f;
    }
    return out;
}

fs::path DatasetManifest::video_dir(const ManifestEntry& e) const { return resolve(root, e.path); }
fs::path DatasetManifest::boxes_file(const ManifestEntry& e) const { return resolve(root, e.boxes_path); }

std::vector<ManifestEntry> DatasetManifest::split(const std::string& name) const {
    std::vector<ManifestEntry> out;
    std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
                 [&](const ManifestEntry& e) { return e.split == name; });
    return out;
}

void DatasetManifest::save(const fs::path& file) const {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    const auto tmp = fs::path(file.string() + ".tmp");
    {
        std::ofstream out(tmp);
        if (!out) throw IoError("cannot write manifest " + file.string());
        for (const auto& e : entries) {
            json row{{"id", e.id},         {"path", e.path},       {"N", e.frames},
                     {"H", e.height},      {"W", e.width},         {"caption", e.caption},
                     {"boxes", e.boxes_path}, {"split", e.split}};
            out << row.dump() << '\n';
        }
    }
    fs::rename(tmp, file);
}

DatasetManifest DatasetManifest::load(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open manifest " + file.string());
    DatasetManifest m;
    m.root = file.parent_path();
    std::map<std::string, std::string> split_of;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ManifestEntry e;
        try {
            const json row = json::parse(line);
            e.id = row.at("id").get<std::string>();
            e.path = row.at("path").get<std::string>();
            e.frames = row.at("N").get<std::size_t>();
            e.height = row.at("H").get<std::size_t>();
            e.width = row.at("W").get<std::size_t>();
            e.caption = row.value("caption", std::string());
            e.boxes_path = row.value("boxes", std::string());
            e.split = row.value("split", std::string("train"));
        } catch (const json::exception& ex) {
            throw IoError("manifest " + file.string() + " line " + std::to_string(line_no) + ": " + ex.what());
        }
        if (auto it = split_of.find(e.id); it != split_of.end()) {
            throw IoError("manifest " + file.string() + ": id '" + e.id + "' appears twice" +
                          (it->second != e.split ? " (in splits '" + it->second + "' and '" + e.split + "')" : ""));
        }
        split_of[e.id] = e.split;
        if (!fs::exists(m.video_dir(e))) {
            throw IoError("manifest " + file.string() + ": path for '" + e.id + "' does not exist: " +
                          m.video_dir(e).string());
        }
        if (!e.boxes_path.empty() && !fs::exists(m.boxes_file(e))) {
            throw IoError("manifest " + file.string() + ": box file for '" + e.id + "' does not exist");
        }
        m.entries.push_back(std::move(e));
    }
    return m;
}

std::optional<std::string> filter_rule(const RGBAVideo& video, const FilterOptions& options) {
    if (std::min(video.height(), video.width()) < options.min_resolution) return std::string(kRuleMinResolution);
    const bool all_white = std::all_of(video.frames.begin(), video.frames.end(), [](const RGBAImage& f) {
        return std::all_of(f.alpha.begin(), f.alpha.end(), [](float a) { return a >= 1.0f; });
    });
    if (all_white) return std::string(kRuleWhiteAlpha);
    return std::nullopt;
}

std::pair<DatasetManifest, FilterReport> filter_dataset(const DatasetManifest& manifest, const FilterOptions& options) {
    DatasetManifest kept;
    kept.root = manifest.root;
    FilterReport report;
    report.input = manifest.entries.size();
    for (const char* rule : {kRuleUnreadable, kRuleMinResolution, kRuleWhiteAlpha}) report.removed[rule] = 0;
    for (const auto& e : manifest.entries) {
        std::optional<std::string> rule;
        try {
            rule = filter_rule(load_rgba_sequence(manifest.video_dir(e)), options);
        } catch (const std::exception& ex) {
            std::clog << "filter: dropping '" << e.id << "': " << ex.what() << '\n';
            rule = kRuleUnreadable;
        }
        if (rule) {
            ++report.removed[*rule];
            report.dropped.emplace_back(e.id, *rule);
        } else {
            kept.entries.push_back(e);
        }
    }
    report.retained = kept.entries.size();
    return {kept, report};
}

}  // namespace tvdm::dataio
