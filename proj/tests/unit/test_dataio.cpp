#include <cmath>
#include <filesystem>
#include <set>

#include "doctest.h"
#include "tvdm/dataio/dataset.hpp"
#include "tvdm/dataio/io.hpp"
#include "tvdm/dataio/sprites.hpp"
#include "tvdm/numcore/errors.hpp"

using namespace tvdm;
using namespace tvdm::dataio;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("tvdm_dataio_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RGBAVideo solid_video(std::size_t h, std::size_t w, std::size_t n, float alpha) {
    RGBAVideo v;
    for (std::size_t i = 0; i < n; ++i) {
        RGBAImage f(h, w);
        std::fill(f.alpha.begin(), f.alpha.end(), alpha);
        std::fill(f.rgb.begin(), f.rgb.end(), 0.3f);
        v.frames.push_back(f);
    }
    return v;
}

}  // namespace

TEST_SUITE("dataio") {

TEST_CASE("still sprite: frames and boxes identical") {
    SpriteParams p;
    p.motion = SpriteMotion::still;
    const auto s = gen_sprite_video(5, p);
    REQUIRE(s.video.frames.size() == 8);
    for (const auto& f : s.video.frames) {
        CHECK(f.rgb == s.video.frames[0].rgb);
        CHECK(f.alpha == s.video.frames[0].alpha);
    }
    for (const auto& b : s.boxes) CHECK(b == s.boxes[0]);
    CHECK(s.video.caption == "a red circle staying still");
}

TEST_CASE("drift advances the extracted box by v/(W-1) per frame") {
    for (int v : {1, 2}) {
        for (auto shape : {SpriteShape::circle, SpriteShape::square, SpriteShape::star}) {
            SpriteParams p;
            p.shape = shape;
            p.motion = SpriteMotion::drift;
            p.direction = Direction::right;
            p.speed = v;
            p.size = 4;
            const auto s = gen_sprite_video(11, p);
            const double step = static_cast<double>(v) / (p.width - 1);
            double prev = -1;
            for (std::size_t i = 0; i < s.video.frames.size(); ++i) {
                const auto& f = s.video.frames[i];
                const auto nb = amcm::normalize_box(*amcm::extract_bbox(f.alpha, f.height, f.width), f.height, f.width);
                if (i > 0) CHECK(nb.x_min - prev == doctest::Approx(step).epsilon(1e-12));
                prev = nb.x_min;
            }
        }
    }
}

TEST_CASE("hard-edged alpha is binary, soft edges add partial coverage") {
    numcore::Rng rng(1);
    for (int k = 0; k < 20; ++k) {
        auto p = random_sprite_params(rng, 32, 32, 8, 0.0);
        const auto s = gen_sprite_video(k, p);
        for (const auto& f : s.video.frames) {
            for (float a : f.alpha) REQUIRE((a == 0.0f || a == 1.0f));
        }
    }
    SpriteParams p;
    p.soft_edge = true;
    const auto s = gen_sprite_video(2, p);
    const auto& a = s.video.frames[0].alpha;
    CHECK(std::any_of(a.begin(), a.end(), [](float v) { return v > 0.0f && v < 1.0f; }));
    CHECK(std::any_of(a.begin(), a.end(), [](float v) { return v == 1.0f; }));
}

TEST_CASE("generator is deterministic") {
    numcore::Rng r1(9), r2(9);
    const auto p1 = random_sprite_params(r1, 32, 32, 8, 0.5);
    const auto p2 = random_sprite_params(r2, 32, 32, 8, 0.5);
    const auto a = gen_sprite_video(42, p1), b = gen_sprite_video(42, p2);
    for (std::size_t i = 0; i < a.video.frames.size(); ++i) {
        CHECK(a.video.frames[i].rgb == b.video.frames[i].rgb);
        CHECK(a.video.frames[i].alpha == b.video.frames[i].alpha);
    }
    CHECK(a.video.caption == b.video.caption);
}

TEST_CASE("generator boxes equal extract_bbox on hard-edged sprites; sprites stay in frame") {
    numcore::Rng rng(2);
    for (int k = 0; k < 200; ++k) {
        const auto p = random_sprite_params(rng, 32, 32, 8, 0.0);
        const auto s = gen_sprite_video(rng.next_u64(), p);
        for (std::size_t i = 0; i < s.boxes.size(); ++i) {
            const auto& f = s.video.frames[i];
            const auto b = amcm::extract_bbox(f.alpha, f.height, f.width);
            REQUIRE(b.has_value());
            REQUIRE(*b == s.boxes[i]);
            // A one-pixel transparent margin around the sprite.
            CHECK(b->x_min >= 1);
            CHECK(b->x_max <= 30);
        }
    }
}

TEST_CASE("sprite configuration errors") {
    SpriteParams p;
    p.size = 20;
    CHECK_THROWS_AS(gen_sprite_video(0, p), ConfigError);
    p.size = 6;
    p.motion = SpriteMotion::drift;
    p.speed = 5;
    CHECK_THROWS_AS(gen_sprite_video(0, p), ConfigError);
    p.speed = 1;
    p.start_x = 2;
    CHECK_THROWS_AS(gen_sprite_video(0, p), ConfigError);
}

TEST_CASE("palette avoids the key green and captions use the closed vocabulary") {
    for (const auto& c : palette()) {
        const double d = std::hypot(c.rgb[0], c.rgb[1] - 1.0, c.rgb[2]);
        CHECK(d > 0.5);
    }
    const auto vocab = caption_vocabulary();
    const std::set<std::string> words(vocab.begin(), vocab.end());
    numcore::Rng rng(4);
    for (int k = 0; k < 100; ++k) {
        const auto cap = caption_for(random_sprite_params(rng, 32, 32, 8, 0.2));
        std::size_t start = 0;
        while (start < cap.size()) {
            const auto end = std::min(cap.find(' ', start), cap.size());
            CHECK(words.count(cap.substr(start, end - start)) == 1);
            start = end + 1;
        }
    }
}

TEST_CASE("rgba sequence round trip within 1/255") {
    const auto dir = scratch("roundtrip");
    SpriteParams p;
    p.soft_edge = true;
    p.motion = SpriteMotion::oscillate;
    p.frames = 12;
    auto s = gen_sprite_video(3, p);
    s.video.fps = 12;
    save_rgba_sequence(s.video, dir);
    const auto back = load_rgba_sequence(dir);
    REQUIRE(back.frames.size() == 12);
    CHECK(back.fps == 12);
    CHECK(back.caption == s.video.caption);
    float worst = 0.0f;
    for (std::size_t i = 0; i < 12; ++i) {
        for (std::size_t k = 0; k < back.frames[i].rgb.size(); ++k)
            worst = std::max(worst, std::abs(back.frames[i].rgb[k] - s.video.frames[i].rgb[k]));
        for (std::size_t k = 0; k < back.frames[i].alpha.size(); ++k)
            worst = std::max(worst, std::abs(back.frames[i].alpha[k] - s.video.frames[i].alpha[k]));
    }
    CHECK(worst <= 1.0f / 255.0f + 1e-7f);
    // Lexicographic order of the files is frame order.
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".png") names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    CHECK(names[10] == "frame_0010.png");
    fs::remove_all(dir);
}

TEST_CASE("missing frame and mixed sizes are load errors") {
    const auto dir = scratch("gap");
    save_rgba_sequence(solid_video(8, 8, 4, 0.5f), dir);
    fs::remove(dir / "frame_0002.png");
    try {
        load_rgba_sequence(dir);
        FAIL("expected an error");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("frame_0002.png") != std::string::npos);
    }
    const auto dir2 = scratch("mixed");
    save_rgba_sequence(solid_video(8, 8, 2, 0.5f), dir2);
    save_rgba_sequence(solid_video(8, 9, 3, 0.5f), dir2 / "other");
    fs::copy_file(dir2 / "other" / "frame_0002.png", dir2 / "frame_0002.png");
    CHECK_THROWS_AS(load_rgba_sequence(dir2), ShapeError);
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("premultiply and unpremultiply") {
    RGBAImage img(4, 4);
    numcore::Rng rng(8);
    for (auto& v : img.rgb) v = static_cast<float>(rng.uniform());
    for (auto& v : img.alpha) v = static_cast<float>(rng.uniform());
    img.alpha[0] = 0.0f;
    const auto pm = premultiply(img);
    CHECK(pm.rgb[0] == 0.0f);
    const auto back = unpremultiply(pm);
    for (std::size_t p = 0; p < img.pixels(); ++p) {
        if (img.alpha[p] <= 1.0f / 255.0f) continue;
        for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(back.rgb[p * 3 + c] - img.rgb[p * 3 + c]) <= 1e-6);
    }
    RGBAImage opaque = img;
    std::fill(opaque.alpha.begin(), opaque.alpha.end(), 1.0f);
    CHECK(premultiply(opaque).rgb == opaque.rgb);
}

TEST_CASE("filter rules") {
    CHECK(filter_rule(solid_video(16, 16, 2, 1.0f)) == std::optional<std::string>(kRuleWhiteAlpha));
    CHECK(filter_rule(solid_video(99, 200, 1, 0.5f), {100}) == std::optional<std::string>(kRuleMinResolution));
    CHECK_FALSE(filter_rule(solid_video(100, 100, 1, 0.5f), {100}).has_value());
    auto mostly_white = solid_video(16, 16, 2, 1.0f);
    mostly_white.frames[1].alpha[5] = 0.9f;
    CHECK_FALSE(filter_rule(mostly_white).has_value());
}

TEST_CASE("filter_dataset over a manifest with a report per rule") {
    const auto dir = scratch("filter");
    DatasetSpec spec;
    spec.train = 6;
    spec.eval = 2;
    auto manifest = write_sprite_dataset(spec, dir);
    save_rgba_sequence(solid_video(32, 32, 8, 1.0f), dir / "extra/white");
    save_rgba_sequence(solid_video(12, 40, 8, 0.5f), dir / "extra/small");
    fs::create_directories(dir / "extra/broken");
    manifest.entries.push_back({"white", "extra/white", 8, 32, 32, "", "", "train"});
    manifest.entries.push_back({"small", "extra/small", 8, 12, 40, "", "", "train"});
    manifest.entries.push_back({"broken", "extra/broken", 8, 32, 32, "", "", "train"});
    manifest.save(dir / "manifest.jsonl");
    const auto loaded = DatasetManifest::load(dir / "manifest.jsonl");
    CHECK(loaded.entries.size() == 11);
    const auto [kept, report] = filter_dataset(loaded);
    CHECK(report.input == 11);
    CHECK(report.retained == 8);  // every generated video passes
    CHECK(report.removed.at(kRuleWhiteAlpha) == 1);
    CHECK(report.removed.at(kRuleMinResolution) == 1);
    CHECK(report.removed.at(kRuleUnreadable) == 1);
    const auto samples = load_split(kept, "eval");
    CHECK(samples.size() == 2);
    CHECK(samples[0].boxes.size() == 8);
    fs::remove_all(dir);
}

TEST_CASE("manifest rejects duplicate ids across splits and missing paths") {
    const auto dir = scratch("manifest");
    save_rgba_sequence(solid_video(16, 16, 1, 0.5f), dir / "a");
    DatasetManifest m;
    m.entries.push_back({"x", "a", 1, 16, 16, "", "", "train"});
    m.entries.push_back({"x", "a", 1, 16, 16, "", "", "eval"});
    m.save(dir / "m.jsonl");
    CHECK_THROWS_AS(DatasetManifest::load(dir / "m.jsonl"), IoError);
    m.entries.pop_back();
    m.entries.push_back({"y", "missing", 1, 16, 16, "", "", "eval"});
    m.save(dir / "m.jsonl");
    CHECK_THROWS_AS(DatasetManifest::load(dir / "m.jsonl"), IoError);
    fs::remove_all(dir);
}

TEST_CASE("dataset items depend only on seed, split and index") {
    DatasetSpec a;
    a.train = 3;
    a.eval = 1;
    DatasetSpec b = a;
    b.train = 5;
    const auto va = make_sprite_videos(a, "train"), vb = make_sprite_videos(b, "train");
    for (std::size_t i = 0; i < 3; ++i) CHECK(va[i].video.frames[3].alpha == vb[i].video.frames[3].alpha);
    CHECK(make_sprite_videos(a, "eval")[0].video.caption != "" );
}

}
