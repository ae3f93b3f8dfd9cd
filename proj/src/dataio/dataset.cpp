#include "tvdm/dataio/dataset.hpp"

#include <cstdio>

#include "tvdm/numcore/errors.hpp"

namespace tvdm::dataio {

namespace {

std::uint64_t split_salt(const std::string& split) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : split) h = (h ^ c) * 1099511628211ULL;
    return h;
}

}  // namespace

std::vector<SpriteVideo> make_sprite_videos(const DatasetSpec& spec, const std::string& split) {
    const std::size_t count = split == "eval" ? spec.eval : spec.train;
    numcore::Rng root(spec.seed ^ split_salt(split));
    std::vector<SpriteVideo> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        numcore::Rng item = root.fork();
        const auto params =
            random_sprite_params(item, spec.height, spec.width, spec.frames, spec.soft_edge_probability);
        out.push_back(gen_sprite_video(item.next_u64(), params));
    }
    return out;
}

amcm::BoxSequence ground_truth_boxes(const SpriteVideo& video) {
    std::vector<std::optional<amcm::PixelBox>> boxes(video.boxes.begin(), video.boxes.end());
    return amcm::normalize_boxes(boxes, video.video.height(), video.video.width());
}

DatasetManifest write_sprite_dataset(const DatasetSpec& spec, const std::filesystem::path& dir) {
    DatasetManifest manifest;
    manifest.root = dir;
    for (const std::string split : {"train", "eval"}) {
        const auto videos = make_sprite_videos(spec, split);
        for (std::size_t i = 0; i < videos.size(); ++i) {
            char id[64];
            std::snprintf(id, sizeof id, "%s_%05zu", split.c_str(), i);
            const std::string rel = split + "/" + id;
            save_rgba_sequence(videos[i].video, dir / rel);
            amcm::write_box_file(dir / rel / "boxes.txt", ground_truth_boxes(videos[i]));
            manifest.entries.push_back({id, rel, spec.frames, spec.height, spec.width, videos[i].video.caption,
                                        rel + "/boxes.txt", split});
        }
    }
    manifest.save(dir / "manifest.jsonl");
    return manifest;
}

std::vector<LoadedSample> load_split(const DatasetManifest& manifest, const std::string& split) {
    std::vector<LoadedSample> out;
    for (const auto& e : manifest.split(split)) {
        LoadedSample s;
        s.video = load_rgba_sequence(manifest.video_dir(e));
        if (s.video.caption.empty()) s.video.caption = e.caption;
        if (!e.boxes_path.empty()) {
            s.boxes = amcm::read_box_file(manifest.boxes_file(e));
        } else {
            std::vector<std::optional<amcm::PixelBox>> boxes;
            for (const auto& f : s.video.frames) boxes.push_back(amcm::extract_bbox(f.alpha, f.height, f.width));
            s.boxes = amcm::normalize_boxes(boxes, s.video.height(), s.video.width());
        }
        if (s.boxes.size() != s.video.frames.size()) {
            throw IoError("sample '" + e.id + "': " + std::to_string(s.boxes.size()) + " box rows for " +
                          std::to_string(s.video.frames.size()) + " frames");
        }
        out.push_back(std::move(s));
    }
    if (out.empty()) throw IoError("manifest has no '" + split + "' entries");
    return out;
}

}  // namespace tvdm::dataio
