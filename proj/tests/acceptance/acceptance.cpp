// Acceptance runner: one PASS/FAIL line per criterion. Exit status is nonzero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "grad_suite.hpp"
#include "json.hpp"
#include "tvdm/amcm/boxes.hpp"
#include "tvdm/amcm/module.hpp"
#include "tvdm/autoenc/image_tensor.hpp"
#include "tvdm/autoenc/training.hpp"
#include "tvdm/cli/app.hpp"
#include "tvdm/dataio/dataset.hpp"
#include "tvdm/evalkit/metrics.hpp"
#include "tvdm/evalkit/report.hpp"
#include "tvdm/vdm/diffusion.hpp"
#include "tvdm/vdm/pipeline.hpp"
#include "tvdm/vdm/schedule.hpp"

namespace fs = std::filesystem;
using namespace tvdm;
using numcore::Rng;
using TF = numcore::Tensor<float>;
using TD = numcore::Tensor<double>;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Env {
    fs::path work;      // scratch root for every criterion
    bool reuse = false; // keep already-trained stages of the full-size run
    std::ofstream cli_log;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream s;
    s << std::setprecision(precision) << v;
    return s.str();
}

bool same_bits(std::span<const float> a, std::span<const float> b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void cli(Env& env, const std::vector<std::string>& args) {
    std::ostringstream err;
    const int code = cli::run(args, env.cli_log, err);
    env.cli_log.flush();
    if (code != cli::kExitOk) {
        throw std::runtime_error("tvdm " + args.front() + " exited with " + std::to_string(code) + ": " + err.str());
    }
}

// alpha_bar by direct product of (1 - beta); independent of the library's schedule code.
std::vector<double> linear_alpha_bar(std::size_t T, double b0, double b1) {
    std::vector<double> ab(T);
    double prod = 1.0;
    for (std::size_t t = 0; t < T; ++t) {
        const double beta = T == 1 ? b0 : b0 + (b1 - b0) * static_cast<double>(t) / static_cast<double>(T - 1);
        prod *= 1.0 - beta;
        ab[t] = prod;
    }
    return ab;
}

// ---------------------------------------------------------------------------------------------

Outcome gradient_suite(Env&) {
    const auto start = Clock::now();
    const auto families = acceptance::run_grad_suite(20);
    const double secs = seconds_since(start);
    double worst = 0.0;
    std::string worst_name, thin;
    for (const auto& f : families) {
        if (f.max_rel_error >= worst) {
            worst = f.max_rel_error;
            worst_name = f.name;
        }
        if (f.shapes < 20) thin += " " + f.name;
    }
    const bool pass = worst < 1e-3 && thin.empty() && secs < 120.0;
    return {pass, std::to_string(families.size()) + " ops/layers/losses x 20 shapes, max rel err " + fmt(worst, 3) +
                      " (" + worst_name + ")" + (thin.empty() ? "" : ", under 20 shapes:" + thin) + ", " +
                      fmt(secs, 3) + " s"};
}

Outcome forward_statistics(Env&) {
    const auto start = Clock::now();
    constexpr std::size_t T = 1000, kDraws = 10000;
    const auto schedule = vdm::make_linear_schedule(T);
    const auto ab = linear_alpha_bar(T, 1e-4, 2e-2);
    Rng rng(21);
    bool pass = true;
    std::ostringstream detail;
    for (const std::size_t t : {std::size_t{1}, T / 2, T}) {
        const double z0 = 0.8;
        const TD clean = TD::full({kDraws}, z0);
        const auto x = vdm::q_sample(clean, std::vector<std::size_t>(kDraws, t), TD::randn({kDraws}, rng), schedule);
        double m = 0.0;
        for (double v : x.data()) m += v;
        m /= kDraws;
        double var = 0.0;
        for (double v : x.data()) var += (v - m) * (v - m);
        var /= kDraws - 1;
        const double want_mean = std::sqrt(ab[t - 1]) * z0, want_var = 1.0 - ab[t - 1];
        const double mean_sigma = std::sqrt(want_var / kDraws);
        const double var_sigma = want_var * std::sqrt(2.0 / (kDraws - 1));
        const double zm = std::abs(m - want_mean) / mean_sigma, zv = std::abs(var - want_var) / var_sigma;
        pass = pass && zm < 3.0 && zv < 3.0;
        detail << "t=" << t << " mean " << fmt(zm, 2) << "s var " << fmt(zv, 2) << "s; ";
    }
    const double secs = seconds_since(start);
    pass = pass && secs < 10.0;
    detail << fmt(secs, 2) << " s";
    return {pass, detail.str()};
}

Outcome zero_perturbation(Env&) {
    Rng rng(31);
    const autoenc::Vae<float> vae(autoenc::VaeConfig{}, rng);
    const autoenc::Tvae<float> tvae(autoenc::TvaeConfig{}, rng);  // encoder output starts at exactly zero
    dataio::DatasetSpec spec;
    spec.eval = 4;
    spec.seed = 31;
    numcore::NoGradGuard no_grad;
    bool pass = true;
    std::size_t frames = 0;
    for (const auto& sv : dataio::make_sprite_videos(spec, "eval")) {
        const auto& f = sv.video.frames;
        const auto smooth_frames = autoenc::smooth_all(f);
        const auto raw = autoenc::rgb_tensor<float>(f), smooth = autoenc::rgb_tensor<float>(smooth_frames);
        const auto alpha = autoenc::alpha_tensor<float>(f);
        const auto vanilla = vae.decode(vae.encode(smooth).mean);
        const auto pass_through = autoenc::tvae_forward(vae, tvae, raw, smooth, alpha);
        const auto explicit_zero =
            vae.decode(autoenc::AdjustedLatent<float>(pass_through.z, TF::zeros(pass_through.z.shape())).tensor());
        pass = pass && std::all_of(pass_through.z_alpha.data().begin(), pass_through.z_alpha.data().end(),
                                   [](float v) { return v == 0.0f; });
        pass = pass && same_bits(pass_through.rgb_hat.data(), vanilla.data()) && same_bits(explicit_zero.data(), vanilla.data());
        frames += f.size();
    }
    return {pass, std::to_string(frames) + " frames, adjusted-path decode vs vanilla decode compared bitwise"};
}

Outcome amcm_identity(Env&) {
    Rng rng(41);
    const vdm::VdmConfig cfg;
    const vdm::UNet<float> unet(cfg, rng);
    const auto module = amcm::Amcm<float>::for_unet(unet, rng);
    numcore::NoGradGuard no_grad;
    bool pass = true;
    for (int i = 0; i < 10; ++i) {
        const std::size_t B = 1 + i % 2;
        const auto x = TF::randn({B, cfg.frames, cfg.latent_channels, 4, 4}, rng);
        const auto cond = TF::randn({B, cfg.latent_channels, 4, 4}, rng);
        std::vector<std::size_t> t;
        for (std::size_t b = 0; b < B; ++b) t.push_back(static_cast<std::size_t>(rng.uniform_int(1, 1000)));
        const auto text = unet.text(std::vector<std::string>(B, i % 2 ? "a blue star rotating" : "a red circle"));
        std::vector<float> corners;
        for (std::size_t k = 0; k < B * cfg.frames; ++k) {
            const double x0 = rng.uniform(0.0, 0.6), y0 = rng.uniform(0.0, 0.6);
            for (double c : {x0, y0, x0 + rng.uniform(0.05, 0.4), y0 + rng.uniform(0.05, 0.4)}) corners.push_back(static_cast<float>(c));
        }
        const amcm::BoxConstraint<float> hook(module, TF({B, cfg.frames, 4}, std::move(corners)));
        pass = pass && same_bits(unet.forward(x, t, cond, text, &hook).data(), unet.forward(x, t, cond, text).data());
    }
    return {pass, "10 random inputs, default backbone with and without untrained blocks, bitwise"};
}

Outcome sampler_oracle(Env&) {
    const auto start = Clock::now();
    const auto schedule = vdm::make_linear_schedule(1000);
    const auto ab = linear_alpha_bar(1000, 1e-4, 2e-2);
    Rng rng(51);
    const auto z0 = TF::randn({2, 8, 4, 4, 4}, rng);
    const std::size_t per = z0.numel() / 2;
    // eps that exactly explains z_t for data concentrated at z0.
    const vdm::EpsModel<float> oracle = [&](const TF& z_t, const std::vector<std::size_t>& t) {
        std::vector<float> out(z_t.numel());
        for (std::size_t b = 0; b < 2; ++b) {
            const double a = ab[t[b] - 1];
            for (std::size_t k = b * per; k < (b + 1) * per; ++k) {
                out[k] = static_cast<float>((z_t.data()[k] - std::sqrt(a) * z0.data()[k]) / std::sqrt(1.0 - a));
            }
        }
        return TF(z_t.shape(), std::move(out));
    };
    Rng noise(52);
    const auto out = vdm::ddim_sample(oracle, z0.shape(), schedule, 50, noise);
    double err = 0.0;
    for (std::size_t k = 0; k < z0.numel(); ++k) err = std::max(err, std::abs(double(out.data()[k]) - z0.data()[k]));
    const double secs = seconds_since(start);
    return {err < 1e-3 && secs < 30.0, "max abs error " + fmt(err, 3) + " at 50 steps, " + fmt(secs, 2) + " s"};
}

// Returns (x_min, y_min, x_max, y_max) by visiting every pixel.
std::optional<amcm::PixelBox> scan_bbox(const std::vector<float>& a, std::size_t h, std::size_t w) {
    int x0 = INT32_MAX, y0 = INT32_MAX, x1 = -1, y1 = -1;
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            if (a[y * w + x] > 0.5f) {
                x0 = std::min(x0, int(x));
                y0 = std::min(y0, int(y));
                x1 = std::max(x1, int(x));
                y1 = std::max(y1, int(y));
            }
        }
    }
    if (x1 < 0) return std::nullopt;
    return amcm::PixelBox{x0, y0, x1, y1};
}

Outcome bbox_oracle(Env&) {
    Rng rng(61);
    std::size_t mismatches = 0, empty = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto h = static_cast<std::size_t>(rng.uniform_int(1, 40)), w = static_cast<std::size_t>(rng.uniform_int(1, 40));
        std::vector<float> a(h * w, 0.0f);
        switch (i % 4) {
            case 0: {  // sparse scatter, often empty
                const double p = rng.uniform(0.0, 0.05);
                for (auto& v : a) v = rng.uniform() < p ? 1.0f : 0.0f;
                break;
            }
            case 1:  // continuous values straddling the threshold
                for (auto& v : a) v = static_cast<float>(rng.uniform());
                break;
            case 2: {  // filled blob
                const double cx = rng.uniform(0.0, double(w)), cy = rng.uniform(0.0, double(h)), r = rng.uniform(0.5, 12.0);
                for (std::size_t y = 0; y < h; ++y)
                    for (std::size_t x = 0; x < w; ++x) a[y * w + x] = std::hypot(x - cx, y - cy) < r ? 1.0f : 0.0f;
                break;
            }
            default: {  // values exactly at the threshold never count
                for (auto& v : a) v = rng.uniform() < 0.5 ? 0.5f : 0.0f;
                a[static_cast<std::size_t>(rng.uniform_int(0, std::int64_t(h * w) - 1))] = 0.51f;
            }
        }
        const auto got = amcm::extract_bbox(a, h, w, 0.5f), want = scan_bbox(a, h, w);
        if (!want) ++empty;
        const bool same = got.has_value() == want.has_value() &&
                          (!got || (got->x_min == want->x_min && got->y_min == want->y_min && got->x_max == want->x_max &&
                                    got->y_max == want->y_max));
        if (!same) ++mismatches;
    }
    const auto n = amcm::normalize_box({96, 96, 288, 288}, 384, 384);
    double dev = 0.0;
    for (auto [got, want] : {std::pair{n.x_min, 0.25}, {n.y_min, 0.25}, {n.x_max, 0.75}, {n.y_max, 0.75}}) {
        dev = std::max(dev, std::abs(got - want));
    }
    return {mismatches == 0 && dev <= 1.0 / 383.0,
            std::to_string(mismatches) + " mismatches in 1000 masks (" + std::to_string(empty) +
                " empty); 384x384 box max deviation " + fmt(dev, 3) + " (limit " + fmt(1.0 / 383.0, 3) + ")"};
}

// ---------------------------------------------------------------------------------------------
// Full-size run shared by the stage-1, ablation and baseline criteria.

struct FullRun {
    fs::path root;
    double stage1_seconds = -1.0;  // negative when the stages were reused
    double stage2_seconds = -1.0;
};

FullRun& full_run(Env& env) {
    static std::optional<FullRun> run;
    if (run) return *run;
    FullRun r;
    r.root = env.work / "full";
    const std::vector<std::string> out{"--out", r.root.string()};
    auto stage = [&](const std::string& name, std::vector<std::string> extra = {}) {
        if (env.reuse && fs::exists(cli::stage_dir(r.root, name))) return false;
        std::vector<std::string> args{name, "--force"};
        args.insert(args.end(), out.begin(), out.end());
        args.insert(args.end(), extra.begin(), extra.end());
        cli(env, args);
        return true;
    };
    stage("gen-data");
    auto start = Clock::now();
    const bool fresh_vae = stage("train-vae");
    const bool fresh_tvae = stage("train-tvae");
    if (fresh_vae && fresh_tvae) r.stage1_seconds = seconds_since(start);
    start = Clock::now();
    const bool fresh_vdm = stage("train-vdm");
    const bool fresh_amcm = stage("train-amcm");
    if (fresh_vdm && fresh_amcm) r.stage2_seconds = seconds_since(start);
    run = r;
    return *run;
}

vdm::Autoencoders load_autoencoders(const fs::path& root) {
    return {autoenc::load_vae(numcore::Checkpoint::load(cli::checkpoint_file(root, "train-vae"))),
            autoenc::load_tvae(numcore::Checkpoint::load(cli::checkpoint_file(root, "train-tvae")))};
}

Outcome stage1_training(Env& env) {
    const auto& run = full_run(env);
    const auto ae = load_autoencoders(run.root);
    const auto manifest = dataio::DatasetManifest::load(cli::manifest_file(run.root));
    const auto train = manifest.split("train");
    const auto eval = dataio::load_split(manifest, "eval");
    numcore::NoGradGuard no_grad;
    double iou = 0.0, se_vae = 0.0, se_adj = 0.0;
    std::size_t frames = 0, values = 0;
    for (const auto& sample : eval) {
        const auto& f = sample.video.frames;
        const auto smooth = autoenc::rgb_tensor<float>(autoenc::smooth_all(f));
        const auto pass = autoenc::tvae_forward(ae.vae, ae.tvae, autoenc::rgb_tensor<float>(f), smooth, autoenc::alpha_tensor<float>(f));
        const auto vanilla = ae.vae.decode(ae.vae.encode(smooth).mean);
        const auto pred = autoenc::to_images(pass.out.rgb, pass.out.alpha);
        for (std::size_t i = 0; i < f.size(); ++i) iou += evalkit::alpha_iou(pred[i].alpha, f[i].alpha);
        for (std::size_t k = 0; k < smooth.numel(); ++k) {
            const double t = smooth.data()[k];
            se_vae += std::pow(vanilla.data()[k] - t, 2);
            se_adj += std::pow(pass.rgb_hat.data()[k] - t, 2);
        }
        frames += f.size();
        values += smooth.numel();
    }
    iou /= static_cast<double>(frames);
    const double degradation = 10.0 * std::log10(se_adj / se_vae);  // PSNR(vanilla) - PSNR(adjusted)
    const bool timed = run.stage1_seconds >= 0.0;
    const bool pass = iou >= 0.8 && degradation <= 1.0 && train.size() == 512 && (!timed || run.stage1_seconds <= 1800.0);
    return {pass, std::to_string(train.size()) + " training sprites; held-out alpha IoU " + fmt(iou) + " (>= 0.8), PSNR degradation " +
                      fmt(degradation, 3) + " dB (<= 1) over " + std::to_string(frames) + " frames; " +
                      (timed ? "VAE + TVAE training " + fmt(run.stage1_seconds, 4) + " s" : "reused checkpoints, not timed")};
}

Outcome ablation_direction(Env& env) {
    const auto& run = full_run(env);
    const fs::path report = cli::stage_dir(run.root, "ablate") / "report.jsonl";
    if (!(env.reuse && fs::exists(report))) cli(env, {"ablate", "--force", "--out", run.root.string()});
    std::istringstream lines(slurp(report));
    std::optional<nlohmann::json> with, without;
    for (std::string line; std::getline(lines, line);) {
        const auto row = nlohmann::json::parse(line);
        if (row.at("method") == evalkit::kMethodWithAmcm) with = row;
        if (row.at("method") == evalkit::kMethodWithoutAmcm) without = row;
    }
    if (!with || !without || !with->contains("aer") || !without->contains("aer")) return {false, "report lacks the AER rows"};
    const double a = with->at("aer"), b = without->at("aer");
    const std::size_t n = with->at("videos");
    return {a < b && n >= 32 && without->at("videos") == n,
            "mean AER with " + fmt(a) + " vs without " + fmt(b) + " over " + std::to_string(n) + " eval videos, shared seeds"};
}

Outcome baseline_comparison(Env& env) {
    const auto& run = full_run(env);
    const auto ae = load_autoencoders(run.root);
    dataio::DatasetSpec spec;
    spec.eval = 64;
    spec.seed = 91;

    // Hard edges: the keyed round trip and where its errors fall.
    spec.soft_edge_probability = 0.0;
    const auto hard = dataio::make_sprite_videos(spec, "eval");
    std::vector<double> hard_iou(hard.size());
    std::vector<std::array<double, 4>> counts(hard.size());  // ring errors, ring pixels, interior errors, interior pixels
    vdm::parallel_for(hard.size(), [&](std::size_t i) {
        const auto& truth = hard[i].video;
        const auto keyed = evalkit::chroma_key_baseline(ae.vae, truth);
        hard_iou[i] = evalkit::alpha_iou(keyed, truth);
        for (std::size_t f = 0; f < truth.frames.size(); ++f) {
            const auto r = evalkit::ring_errors(keyed.frames[f].alpha, truth.frames[f].alpha, truth.height(), truth.width());
            counts[i][0] += r.ring_rate * r.ring_pixels;
            counts[i][1] += r.ring_pixels;
            counts[i][2] += r.interior_rate * r.interior_pixels;
            counts[i][3] += r.interior_pixels;
        }
    });
    std::array<double, 4> total{};
    for (const auto& c : counts)
        for (int k = 0; k < 4; ++k) total[k] += c[k];
    const double ring_rate = total[0] / total[1], interior_rate = total[2] / total[3];
    double key_iou = 0.0;
    for (double v : hard_iou) key_iou += v;
    key_iou /= static_cast<double>(hard.size());

    // Soft edges: transparent reconstruction against the keyed round trip.
    spec.soft_edge_probability = 1.0;
    const auto soft = dataio::make_sprite_videos(spec, "eval");
    std::vector<double> direct(soft.size()), keyed(soft.size());
    vdm::parallel_for(soft.size(), [&](std::size_t i) {
        direct[i] = evalkit::alpha_iou(evalkit::direct_reconstruction(ae, soft[i].video), soft[i].video);
        keyed[i] = evalkit::alpha_iou(evalkit::chroma_key_baseline(ae.vae, soft[i].video), soft[i].video);
    });
    double direct_iou = 0.0, soft_key_iou = 0.0;
    for (std::size_t i = 0; i < soft.size(); ++i) {
        direct_iou += direct[i] / soft.size();
        soft_key_iou += keyed[i] / soft.size();
    }
    const bool pass = key_iou >= 0.9 && ring_rate > interior_rate && direct_iou >= soft_key_iou;
    return {pass, "hard sprites: keyed IoU " + fmt(key_iou) + ", ring error rate " + fmt(ring_rate, 3) + " vs interior " +
                      fmt(interior_rate, 3) + "; soft sprites: direct IoU " + fmt(direct_iou) + " vs keyed " + fmt(soft_key_iou)};
}

// ---------------------------------------------------------------------------------------------

// Every file below root except run logs, keyed by relative path.
std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file() || e.path().filename() == "log.txt") continue;
        files[fs::relative(e.path(), root).string()] = slurp(e.path());
    }
    return files;
}

Outcome determinism(Env& env) {
    const std::vector<std::vector<std::string>> commands{
        {"gen-data", "train_count=6", "eval_count=2", "height=16", "width=16", "frames=4"},
        {"train-vae", "steps=20", "batch=4"},
        {"train-tvae", "steps=20", "batch=4"},
        {"train-vdm", "steps=20", "batch=2", "base_channels=8", "groups=2", "time_dim=16"},
        {"train-amcm", "steps=20", "batch=2"},
        {"generate", "sampler_steps=5"},
        {"ablate", "sampler_steps=5", "baseline=true"},
    };
    std::array<fs::path, 2> roots{env.work / "determinism_a", env.work / "determinism_b"};
    for (const auto& root : roots) {
        fs::remove_all(root);
        for (auto args : commands) {
            args.insert(args.begin() + 1, {"--out", root.string()});
            cli(env, args);
        }
    }
    const auto a = tree(roots[0]), b = tree(roots[1]);
    std::size_t differing = 0, checkpoints = 0, frames = 0;
    for (const auto& [name, bytes] : a) {
        const auto it = b.find(name);
        if (it == b.end() || it->second != bytes) ++differing;
        if (name.ends_with(".tvdm")) ++checkpoints;
        if (name.starts_with("generate/frames/") && name.ends_with(".png")) ++frames;
    }
    const bool pass = differing == 0 && a.size() == b.size() && checkpoints == 4 && frames == 4;
    return {pass, std::to_string(a.size()) + " files from two identical runs (" + std::to_string(checkpoints) + " checkpoints, " +
                      std::to_string(frames) + " generated frames), " + std::to_string(differing) + " differ"};
}

RGBAVideo fixture(std::size_t h, std::size_t w, std::size_t frames, float fill_alpha, std::uint64_t seed) {
    RGBAVideo v;
    Rng rng(seed);
    for (std::size_t f = 0; f < frames; ++f) {
        RGBAImage img(h, w);
        for (auto& c : img.rgb) c = static_cast<float>(rng.uniform());
        std::fill(img.alpha.begin(), img.alpha.end(), fill_alpha);
        v.frames.push_back(std::move(img));
    }
    return v;
}

Outcome filter_rules(Env& env) {
    const fs::path dir = env.work / "filter_fixtures";
    fs::remove_all(dir);
    std::map<std::string, RGBAVideo> videos;
    std::map<std::string, std::string> expected;  // id -> rule, empty when kept

    auto sprite = [](std::size_t h, std::size_t w, std::uint64_t seed) {
        dataio::SpriteParams p;
        p.height = h;
        p.width = w;
        p.size = 3;
        p.frames = 3;
        return dataio::gen_sprite_video(seed, p).video;
    };
    videos["keep_sprite"] = sprite(16, 16, 1);
    videos["keep_exact_min"] = sprite(16, 40, 2);
    videos["keep_nearly_opaque"] = fixture(24, 24, 3, 1.0f, 3);
    videos["keep_nearly_opaque"].frames[2].alpha[17] = 254.0f / 255.0f;
    videos["keep_one_opaque_frame"] = sprite(20, 20, 4);
    std::fill(videos["keep_one_opaque_frame"].frames[0].alpha.begin(), videos["keep_one_opaque_frame"].frames[0].alpha.end(), 1.0f);
    videos["keep_empty_alpha"] = fixture(16, 16, 2, 0.0f, 5);
    videos["small_narrow"] = sprite(15, 48, 6);
    videos["small_short"] = sprite(48, 12, 7);
    videos["white_square"] = fixture(16, 16, 3, 1.0f, 8);
    videos["white_wide"] = fixture(24, 40, 2, 1.0f, 9);
    videos["small_and_white"] = fixture(8, 8, 2, 1.0f, 10);
    for (const auto& [id, v] : videos) expected[id] = "";
    for (const char* id : {"small_narrow", "small_short", "small_and_white"}) expected[id] = dataio::kRuleMinResolution;
    for (const char* id : {"white_square", "white_wide"}) expected[id] = dataio::kRuleWhiteAlpha;

    dataio::DatasetManifest manifest;
    manifest.root = dir;
    for (const auto& [id, v] : videos) {
        dataio::save_rgba_sequence(v, dir / id);
        manifest.entries.push_back({id, id, v.frames.size(), v.height(), v.width(), "fixture", "", "train"});
    }
    manifest.save(dir / "manifest.jsonl");
    const auto loaded = dataio::DatasetManifest::load(dir / "manifest.jsonl");
    const auto [kept, report] = dataio::filter_dataset(loaded, dataio::FilterOptions{16});

    std::map<std::string, std::string> got;
    for (const auto& e : kept.entries) got[e.id] = "";
    for (const auto& [id, rule] : report.dropped) got[id] = rule;
    const bool pass = got == expected && report.removed.at(dataio::kRuleMinResolution) == 3 &&
                      report.removed.at(dataio::kRuleWhiteAlpha) == 2 && report.retained == 5;
    return {pass, "min-resolution removed " + std::to_string(report.removed.at(dataio::kRuleMinResolution)) + "/3, white-alpha " +
                      std::to_string(report.removed.at(dataio::kRuleWhiteAlpha)) + "/2, retained " +
                      std::to_string(report.retained) + "/5 near-miss fixtures"};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::string work = "acceptance_work";
    std::vector<int> only;
    bool reuse = false;
    app.add_option("--work", work, "scratch directory")->capture_default_str();
    app.add_option("--only", only, "criterion numbers to run")->delimiter(',');
    app.add_flag("--reuse", reuse, "keep stages already trained in the scratch directory");
    CLI11_PARSE(app, argc, argv);

    Env env;
    env.work = work;
    env.reuse = reuse;
    fs::create_directories(env.work);
    env.cli_log.open(env.work / "cli.log", std::ios::app);

    const std::vector<std::pair<std::string, std::function<Outcome(Env&)>>> criteria{
        {"gradient suite", gradient_suite},
        {"forward-process statistics", forward_statistics},
        {"zero-perturbation identity", zero_perturbation},
        {"motion module identity at init", amcm_identity},
        {"sampler oracle inversion", sampler_oracle},
        {"bounding-box oracle", bbox_oracle},
        {"stage-1 toy training", stage1_training},
        {"ablation direction", ablation_direction},
        {"chroma-key baseline", baseline_comparison},
        {"determinism", determinism},
        {"dataset filters", filter_rules},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), number) == only.end()) continue;
        Outcome o;
        try {
            o = criteria[i].second(env);
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << number << "  " << criteria[i].first << ": "
                  << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
