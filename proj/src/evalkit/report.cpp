#include "tvdm/evalkit/report.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "tvdm/autoenc/image_tensor.hpp"
#include "tvdm/numcore/errors.hpp"

namespace tvdm::evalkit {

using nlohmann::json;

const MethodMetrics* MetricsReport::find(const std::string& method) const {
    for (const auto& r : rows) {
        if (r.method == method) return &r;
    }
    return nullptr;
}

std::vector<std::string> MetricsReport::missing() const {
    std::vector<std::string> out;
    for (const auto& r : rows) {
        if (r.missing) out.push_back(r.method);
    }
    return out;
}

std::string MetricsReport::jsonl() const {
    std::ostringstream out;
    for (const auto& r : rows) {
        json row{{"dataset", dataset}, {"config_hash", config_hash}, {"seed", seed}, {"method", r.method},
                 {"missing", r.missing}, {"videos", r.videos}};
        if (!r.missing) {
            row["alpha_iou"] = r.alpha_iou;
            row["psnr_db"] = r.psnr_db;
            row["aer"] = r.aer;
            row["fringe"] = r.fringe;
        }
        out << row.dump() << '\n';
    }
    return out.str();
}

std::string MetricsReport::table() const {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-14s %7s %10s %9s %8s %8s\n", "method", "videos", "alpha_iou", "psnr_db", "aer",
                  "fringe");
    out << line;
    for (const auto& r : rows) {
        if (r.missing) {
            std::snprintf(line, sizeof line, "%-14s %7s %10s %9s %8s %8s\n", r.method.c_str(), "n/a", "n/a", "n/a", "n/a",
                          "n/a");
        } else {
            std::snprintf(line, sizeof line, "%-14s %7zu %10.4f %9.2f %8.4f %8.4f\n", r.method.c_str(), r.videos,
                          r.alpha_iou, r.psnr_db, r.aer, r.fringe);
        }
        out << line;
    }
    out << "(FVD/LPIPS not computed; alpha IoU, PSNR over black, artifact escape ratio and green fringe are the proxies)\n";
    return out.str();
}

RGBAVideo chroma_key_baseline(const autoenc::Vae<float>& vae, const RGBAVideo& video, const ChromaKeyOptions& options) {
    video.validate();
    numcore::NoGradGuard no_grad;
    std::vector<RGBAImage> green;
    for (const auto& f : video.frames) {
        RGBAImage g(f.height, f.width);
        g.rgb = composite_green(f).rgb;
        std::fill(g.alpha.begin(), g.alpha.end(), 1.0f);
        green.push_back(std::move(g));
    }
    const auto rgb = vae.decode(vae.encode(autoenc::rgb_tensor<float>(green)).mean);
    RGBAVideo out;
    out.fps = video.fps;
    out.caption = video.caption;
    for (const auto& f : autoenc::to_images(rgb, numcore::Tensor<float>())) {
        out.frames.push_back(chroma_key(RGBImage{f.height, f.width, f.rgb}, options));
    }
    return out;
}

RGBAVideo direct_reconstruction(const vdm::Autoencoders& ae, const RGBAVideo& video) {
    auto out = vdm::decode_adjusted(ae, vdm::encode_adjusted(ae, video));
    out.fps = video.fps;
    out.caption = video.caption;
    return out;
}

namespace {

amcm::BoxSequence eval_boxes(const RGBAVideo& video) {
    const auto& f0 = video.frames.at(0);
    return amcm::inference_boxes(f0.alpha, f0.height, f0.width, video.frames.size()).boxes;
}

bool needs_backbone(const std::string& m) { return m == kMethodWithoutAmcm || m == kMethodWithAmcm; }

}  // namespace

EvalGeneration generate_for_eval(const AblationInputs& in, std::size_t index, bool with_amcm) {
    if (!in.autoencoders || !in.backbone) throw ConfigError("generation needs the autoencoders and the video backbone");
    if (with_amcm && !in.amcm) throw ConfigError("generation with box constraints needs a trained module");
    const auto& e = in.eval.at(index);
    EvalGeneration out;
    out.boxes = eval_boxes(e.video);
    std::optional<amcm::BoxConstraint<float>> hook;
    if (with_amcm) hook.emplace(*in.amcm, amcm::box_tensor(out.boxes));
    vdm::GenerateOptions opts;
    opts.steps = in.sampler_steps;
    opts.seed = in.seed + index;
    out.video = vdm::generate_video(*in.autoencoders, *in.backbone, e.video.frames.at(0), e.video.caption,
                                    hook ? &*hook : nullptr, opts).video;
    return out;
}

MetricsReport ablation_report(const AblationInputs& in, const std::vector<std::string>& methods,
                              const std::string& dataset, const std::string& config_hash) {
    if (!in.autoencoders) throw ConfigError("ablation report needs the autoencoders");
    if (in.eval.empty()) throw ConfigError("ablation report needs at least one eval video");
    MetricsReport report;
    report.dataset = dataset;
    report.config_hash = config_hash;
    report.seed = in.seed;
    for (const auto& m : methods) {
        MethodMetrics row;
        row.method = m;
        const bool known = m == kMethodWithoutAmcm || m == kMethodWithAmcm || m == kMethodChromaKey || m == kMethodDirect;
        if (!known) throw ConfigError("unknown ablation method '" + m + "'");
        row.missing = (needs_backbone(m) && !in.backbone) || (m == kMethodWithAmcm && !in.amcm);
        if (row.missing) {
            report.rows.push_back(row);
            continue;
        }
        const std::size_t n = in.eval.size();
        std::vector<std::array<double, 4>> per(n);
        vdm::parallel_for(n, [&](std::size_t i) {
            const auto& truth = in.eval[i].video;
            RGBAVideo pred;
            amcm::BoxSequence boxes = eval_boxes(truth);
            if (needs_backbone(m)) {
                auto g = generate_for_eval(in, i, m == kMethodWithAmcm);
                pred = std::move(g.video);
                boxes = std::move(g.boxes);
            } else if (m == kMethodChromaKey) {
                pred = chroma_key_baseline(in.autoencoders->vae, truth);
            } else {
                pred = direct_reconstruction(*in.autoencoders, truth);
            }
            per[i] = {alpha_iou(pred, truth), composite_psnr(pred, truth),
                      artifact_escape_ratio(pred, boxes, in.dilation_px), fringe_score(pred)};
        });
        row.videos = n;
        for (const auto& p : per) {
            row.alpha_iou += p[0] / n;
            row.psnr_db += p[1] / n;
            row.aer += p[2] / n;
            row.fringe += p[3] / n;
        }
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace tvdm::evalkit
