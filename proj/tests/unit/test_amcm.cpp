#include <cmath>

#include "doctest.h"
#include "tvdm/amcm/module.hpp"
#include "tvdm/numcore/errors.hpp"
#include "tvdm/numcore/grad_check.hpp"
#include "tvdm/numcore/ops.hpp"

using namespace tvdm;
using namespace tvdm::amcm;
using namespace tvdm::numcore;
using TD = Tensor<double>;
using TF = Tensor<float>;

namespace {

vdm::VdmConfig micro_config() {
    vdm::VdmConfig c;
    c.frames = 3;
    c.latent_channels = 2;
    c.base_channels = 4;
    c.groups = 2;
    c.time_dim = 8;
    c.timesteps = 20;
    return c;
}

template <typename T>
Tensor<T> random_boxes(Rng& rng, std::size_t B, std::size_t N) {
    std::vector<T> v;
    for (std::size_t i = 0; i < B * N; ++i) {
        const double x0 = rng.uniform(0.0, 0.5), y0 = rng.uniform(0.0, 0.5);
        for (double c : {x0, y0, x0 + rng.uniform(0.1, 0.5), y0 + rng.uniform(0.1, 0.5)}) v.push_back(static_cast<T>(c));
    }
    return Tensor<T>({B, N, 4}, std::move(v));
}

}  // namespace

TEST_SUITE("amcm") {

TEST_CASE("untrained module leaves the backbone bit-identical") {
    Rng rng(1);
    const auto cfg = micro_config();
    vdm::UNet<float> unet(cfg, rng);
    const auto amcm = Amcm<float>::for_unet(unet, rng);
    CHECK(amcm.size() == vdm::UNet<float>::kBlocks);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t B = 1 + trial % 2;
        const auto x = TF::randn({B, cfg.frames, 2, 4, 4}, rng);
        const auto cond = TF::randn({B, 2, 4, 4}, rng);
        const auto text = TF::randn({B, vdm::kTextDim}, rng);
        std::vector<std::size_t> t(B);
        for (auto& ti : t) ti = static_cast<std::size_t>(rng.uniform_int(1, 20));
        const BoxConstraint<float> hook(amcm, random_boxes<float>(rng, B, cfg.frames));
        CHECK(unet.forward(x, t, cond, text, &hook).values() == unet.forward(x, t, cond, text).values());
    }
}

TEST_CASE("block preserves shape and rejects mismatched boxes") {
    Rng rng(2);
    for (std::size_t c : {4, 8}) {
        AmcmBlock<float> block(c, rng);
        const auto f = TF::randn({2 * 3, c, 2, 4}, rng);
        CHECK(block(f, random_boxes<float>(rng, 2, 3), 3).shape() == f.shape());
        CHECK_THROWS_AS(block(f, random_boxes<float>(rng, 2, 2), 3), ShapeError);
        CHECK_THROWS_AS(block(f, random_boxes<float>(rng, 3, 3), 3), ShapeError);
        CHECK_THROWS_AS(block(TF::randn({6, c + 1, 2, 4}, rng), random_boxes<float>(rng, 2, 3), 3), ShapeError);
    }
}

TEST_CASE("block gradients match finite differences") {
    Rng rng(3);
    AmcmBlock<double> block(2, rng);
    ParamList<double> params;
    block.collect("b", params);
    randomize(params, rng, 0.5);
    const auto f = TD::randn({2 * 2, 2, 2, 2}, rng, 1.0, true);
    const auto boxes = random_boxes<double>(rng, 2, 2);
    const auto w = TD::randn({4, 2, 2, 2}, rng);
    std::vector<TD> inputs{f, boxes};
    for (const auto& p : params) inputs.push_back(p.tensor);
    const auto err = grad_check([&] { return sum(mul(block(f, boxes, 2), w)); }, inputs);
    CHECK(err.max_rel_error < 1e-3);
}

TEST_CASE("the box input reaches the output once the projection is trained") {
    Rng rng(4);
    AmcmBlock<double> block(4, rng);
    ParamList<double> params;
    block.collect("b", params);
    randomize(params, rng, 0.5);
    const auto f = TD::randn({3, 4, 2, 2}, rng);
    CHECK(block(f, random_boxes<double>(rng, 1, 3), 3).values() != block(f, random_boxes<double>(rng, 1, 3), 3).values());
}

TEST_CASE("block is equivariant to the order of independent samples") {
    Rng rng(5);
    AmcmBlock<double> block(4, rng);
    ParamList<double> params;
    block.collect("b", params);
    randomize(params, rng, 0.5);
    const std::size_t N = 3, per = N * 4 * 2 * 2;
    const auto f = TD::randn({2 * N, 4, 2, 2}, rng);
    const auto boxes = random_boxes<double>(rng, 2, N);
    auto swap_halves = [](const TD& t, std::size_t half) {
        std::vector<double> v(t.data().begin(), t.data().end());
        std::rotate(v.begin(), v.begin() + half, v.end());
        return TD(t.shape(), std::move(v));
    };
    const auto y = block(f, boxes, N);
    const auto y_swapped = block(swap_halves(f, per), swap_halves(boxes, N * 4), N);
    const auto expected = swap_halves(y, per);
    for (std::size_t k = 0; k < y.numel(); ++k) REQUIRE(std::abs(y_swapped.data()[k] - expected.data()[k]) < 1e-12);
}

TEST_CASE("box tensor keeps invalid rows at zero") {
    BoxSequence seq{{{0.1, 0.2, 0.3, 0.4}, {}}, {true, false}};
    const auto t = box_tensor(seq);
    CHECK(t.shape() == Shape{1, 2, 4});
    CHECK(t.values() == std::vector<float>{0.1f, 0.2f, 0.3f, 0.4f, 0, 0, 0, 0});
}

TEST_CASE("stage-2 training touches only module parameters and is deterministic") {
    Rng rng(6);
    const auto cfg = micro_config();
    vdm::VideoDiffusion backbone{vdm::UNet<float>(cfg, rng), vdm::make_linear_schedule(cfg.timesteps), 0.8};
    vdm::LatentDataset data;
    for (int i = 0; i < 4; ++i) {
        data.latents.push_back(TF::randn({cfg.frames, 2, 4, 4}, rng));
        data.captions.push_back("a red circle");
        data.boxes.push_back(random_boxes<float>(rng, 1, cfg.frames).values());
    }
    const auto before = backbone.unet.parameters();
    std::vector<std::vector<float>> snapshot;
    for (const auto& p : before) snapshot.push_back(p.tensor.values());

    AmcmTrainConfig tc;
    tc.train.steps = 3;
    tc.train.batch = 2;
    tc.train.seed = 9;
    const auto a = train_amcm(backbone, data, tc), b = train_amcm(backbone, data, tc);
    CHECK(a.checkpoint.serialize() == b.checkpoint.serialize());
    CHECK(a.history.loss.size() == 3);
    CHECK(max_abs_grad(before) == 0.0);
    for (std::size_t i = 0; i < before.size(); ++i) REQUIRE(before[i].tensor.values() == snapshot[i]);

    // Training moved the zero-initialized projection, so the module is no longer the identity.
    bool moved = false;
    for (const auto& p : a.amcm.parameters()) {
        if (p.name.find(".out.") != std::string::npos) {
            for (float v : p.tensor.data()) moved = moved || v != 0.0f;
        }
    }
    CHECK(moved);

    const auto loaded = load_amcm(a.checkpoint);
    const auto x = TF::randn({1, cfg.frames, 2, 4, 4}, rng);
    const auto cond = TF::randn({1, 2, 4, 4}, rng);
    const auto text = backbone.unet.text({"a red circle"});
    const auto boxes = random_boxes<float>(rng, 1, cfg.frames);
    const BoxConstraint<float> h1(a.amcm, boxes), h2(loaded, boxes);
    CHECK(backbone.unet.forward(x, {4}, cond, text, &h1).values() == backbone.unet.forward(x, {4}, cond, text, &h2).values());
}

}
