#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "tvdm/dataio/sprites.hpp"
#include "tvdm/evalkit/report.hpp"
#include "tvdm/numcore/errors.hpp"

using namespace tvdm;
using namespace tvdm::evalkit;

namespace {

RGBAImage solid(std::size_t h, std::size_t w, std::array<float, 3> c, float a) {
    RGBAImage img(h, w);
    for (std::size_t p = 0; p < img.pixels(); ++p) {
        for (std::size_t k = 0; k < 3; ++k) img.rgb[p * 3 + k] = c[k];
        img.alpha[p] = a;
    }
    return img;
}

std::vector<float> square_mask(std::size_t H, std::size_t W, std::size_t x0, std::size_t y0, std::size_t x1, std::size_t y1) {
    std::vector<float> m(H * W, 0.0f);
    for (std::size_t y = y0; y <= y1; ++y)
        for (std::size_t x = x0; x <= x1; ++x) m[y * W + x] = 1.0f;
    return m;
}

RGBAVideo one_frame_video(const std::vector<float>& alpha, std::size_t H, std::size_t W) {
    RGBAVideo v;
    RGBAImage f(H, W);
    f.alpha = alpha;
    v.frames.push_back(f);
    return v;
}

amcm::BoxSequence pixel_boxes(std::size_t H, std::size_t W, amcm::PixelBox b) {
    return amcm::normalize_boxes({b}, H, W);
}

}  // namespace

TEST_SUITE("evalkit") {

TEST_CASE("green composite closed forms") {
    const auto opaque = composite_green(solid(2, 2, {0.3f, 0.4f, 0.5f}, 1.0f));
    CHECK(opaque.rgb == std::vector<float>{0.3f, 0.4f, 0.5f, 0.3f, 0.4f, 0.5f, 0.3f, 0.4f, 0.5f, 0.3f, 0.4f, 0.5f});
    const auto clear = composite_green(solid(1, 1, {0.9f, 0.1f, 0.2f}, 0.0f));
    CHECK(clear.rgb == std::vector<float>{0.0f, 1.0f, 0.0f});
    const auto half = composite_green(solid(1, 1, {1.0f, 1.0f, 1.0f}, 0.5f));
    CHECK(half.rgb == std::vector<float>{0.5f, 1.0f, 0.5f});
}

TEST_CASE("chroma key thresholds on distance to the key") {
    RGBImage img{1, 3, {0, 1, 0, 1, 0, 0, 0.1f, 0.9f, 0.1f}};
    const auto keyed = chroma_key(img);
    CHECK(keyed.alpha == std::vector<float>{0.0f, 1.0f, 0.0f});
    CHECK(keyed.rgb == img.rgb);
    CHECK_THROWS_AS(chroma_key(img, {0.0, false}), ConfigError);
    CHECK_THROWS_AS(chroma_key(img, {1.0, false}), ConfigError);

    RGBImage row{1, 4, {0, 1, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0}};
    CHECK(chroma_key(row, {0.35, true}).alpha == std::vector<float>{0.0f, 0.5f, 1.0f, 1.0f});
}

TEST_CASE("chroma key inverts the green composite on hard-edged palette sprites") {
    for (const auto& c : dataio::palette()) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < 3; ++k) d2 += (c.rgb[k] - kKeyGreen[k]) * (c.rgb[k] - kKeyGreen[k]);
        REQUIRE(std::sqrt(d2) > 0.35);
    }
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        dataio::SpriteParams p;
        p.color = seed % dataio::palette().size();
        p.shape = static_cast<dataio::SpriteShape>(seed % 3);
        p.frames = 1;
        const auto frame = dataio::gen_sprite_video(seed, p).video.frames[0];
        const auto keyed = chroma_key(composite_green(frame));
        REQUIRE(alpha_iou(keyed.alpha, frame.alpha) == 1.0);
    }
}

TEST_CASE("alpha IoU cases") {
    const auto a = square_mask(8, 8, 0, 0, 3, 3);
    CHECK(alpha_iou(a, a) == 1.0);
    CHECK(alpha_iou(a, square_mask(8, 8, 4, 4, 7, 7)) == 0.0);
    CHECK(alpha_iou(a, square_mask(8, 8, 2, 0, 5, 3)) == doctest::Approx(1.0 / 3.0));
    const std::vector<float> empty(64, 0.0f);
    CHECK(alpha_iou(empty, empty) == 1.0);
    CHECK_THROWS_AS(alpha_iou(a, std::vector<float>(63, 0.0f)), ShapeError);
}

TEST_CASE("artifact escape ratio cases and monotonicity") {
    const std::size_t H = 16, W = 16;
    const auto box = pixel_boxes(H, W, {4, 4, 7, 7});
    CHECK(artifact_escape_ratio(one_frame_video(square_mask(H, W, 4, 4, 7, 7), H, W), box, 0.0) == 0.0);
    CHECK(artifact_escape_ratio(one_frame_video(square_mask(H, W, 12, 12, 15, 15), H, W), box, 2.0) == 1.0);
    CHECK(artifact_escape_ratio(one_frame_video(std::vector<float>(H * W, 0.0f), H, W), box, 2.0) == 0.0);

    // 12 pixels of mass inside, 4 outside.
    auto mask = square_mask(H, W, 4, 4, 7, 6);
    for (std::size_t x = 0; x < 4; ++x) mask[14 * W + x] = 1.0f;
    CHECK(artifact_escape_ratio(one_frame_video(mask, H, W), box, 0.0) == doctest::Approx(0.25));

    numcore::Rng rng(3);
    std::vector<float> noise(H * W);
    for (auto& v : noise) v = static_cast<float>(rng.uniform());
    const auto video = one_frame_video(noise, H, W);
    double prev = 1.0;
    for (double d = 0.0; d <= 16.0; d += 0.5) {
        const double r = artifact_escape_ratio(video, box, d);
        REQUIRE(r <= prev);
        prev = r;
    }
    CHECK(prev == 0.0);
}

TEST_CASE("psnr cases") {
    const std::vector<float> a{0.1f, 0.5f, 0.9f};
    CHECK(psnr(a, a) == kPsnrCap);
    const std::vector<float> b{0.2f, 0.6f, 1.0f};
    CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-5));
    numcore::Rng rng(4);
    std::vector<float> x(100), y(100);
    double se = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
        x[i] = static_cast<float>(rng.uniform());
        y[i] = static_cast<float>(rng.uniform());
        se += (static_cast<double>(x[i]) - y[i]) * (static_cast<double>(x[i]) - y[i]);
    }
    CHECK(psnr(x, y) == doctest::Approx(-10.0 * std::log10(se / 100.0)).epsilon(1e-12));
}

TEST_CASE("ring errors separate edge from interior mistakes") {
    const std::size_t H = 12, W = 12;
    const auto truth = square_mask(H, W, 3, 3, 8, 8);
    const auto ring = boundary_ring(truth, H, W);
    // Ring = outer layer of the square plus the pixels just outside it, without corners outside.
    CHECK(std::count(ring.begin(), ring.end(), true) == 20 + 24);
    auto eroded = square_mask(H, W, 4, 4, 7, 7);
    const auto r = ring_errors(eroded, truth, H, W);
    CHECK(r.ring_rate == doctest::Approx(20.0 / 44.0));
    CHECK(r.interior_rate == 0.0);
    CHECK(r.ring_pixels + r.interior_pixels == H * W);
}

TEST_CASE("fringe score measures alpha-weighted green spill on the edge") {
    auto img = solid(8, 8, {1.0f, 0.0f, 0.0f}, 0.0f);
    for (std::size_t y = 2; y < 6; ++y)
        for (std::size_t x = 2; x < 6; ++x) img.a(y, x) = 1.0f;
    CHECK(fringe_score(img) == 0.0);
    for (std::size_t y = 2; y < 6; ++y) img.channel(y, 2, 1) = 0.9f, img.channel(y, 2, 0) = 0.2f;
    // 4 of the 12 ring pixels carry spill 0.7.
    CHECK(fringe_score(img) == doctest::Approx(4 * 0.7 / 12.0));
}

TEST_CASE("ablation report covers exactly the requested methods and marks gaps") {
    numcore::Rng rng(5);
    vdm::Autoencoders ae{autoenc::Vae<float>({4, 4, 4}, rng), autoenc::Tvae<float>({4, {2, 2, 3}, {2, 3, 3}}, rng)};
    AblationInputs in;
    in.autoencoders = &ae;
    for (std::uint64_t s = 0; s < 3; ++s) {
        dataio::SpriteParams p;
        p.height = p.width = 16;
        p.size = 3;
        p.frames = 2;
        in.eval.push_back({dataio::gen_sprite_video(s, p).video, "v" + std::to_string(s)});
    }
    const auto report = ablation_report(in, {kMethodDirect, kMethodChromaKey, kMethodWithAmcm}, "toy", "abc123");
    REQUIRE(report.rows.size() == 3);
    CHECK(report.rows[0].method == kMethodDirect);
    CHECK(report.rows[1].method == kMethodChromaKey);
    CHECK(report.rows[2].missing);
    CHECK(report.missing() == std::vector<std::string>{kMethodWithAmcm});
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& r = report.rows[i];
        CHECK(r.videos == 3);
        CHECK((r.alpha_iou >= 0.0 && r.alpha_iou <= 1.0));
        CHECK(std::isfinite(r.psnr_db));
        CHECK((r.aer >= 0.0 && r.aer <= 1.0));
    }
    std::istringstream lines(report.jsonl());
    std::size_t n = 0;
    for (std::string line; std::getline(lines, line); ++n) {
        const auto row = nlohmann::json::parse(line);
        CHECK(row.at("config_hash") == "abc123");
        CHECK(row.at("missing").get<bool>() == (n == 2));
    }
    CHECK(n == 3);
    CHECK(report.table().find("n/a") != std::string::npos);
    CHECK(ablation_report(in, {kMethodDirect}, "toy", "x").jsonl() == ablation_report(in, {kMethodDirect}, "toy", "x").jsonl());
    CHECK_THROWS_AS(ablation_report(in, {"bogus"}, "toy", "x"), ConfigError);
}

}
