#include "tvdm/cli/app.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "tvdm/amcm/module.hpp"
#include "tvdm/autoenc/image_tensor.hpp"
#include "tvdm/cli/config.hpp"
#include "tvdm/dataio/dataset.hpp"
#include "tvdm/evalkit/report.hpp"
#include "tvdm/numcore/errors.hpp"

namespace tvdm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path stage_dir(const fs::path& root, const std::string& command) { return root / command; }
fs::path checkpoint_file(const fs::path& root, const std::string& stage) { return stage_dir(root, stage) / "checkpoint.tvdm"; }
fs::path manifest_file(const fs::path& root) { return stage_dir(root, "gen-data") / "manifest.jsonl"; }

namespace {

class TeeBuf : public std::streambuf {
public:
    TeeBuf(std::streambuf* a, std::streambuf* b) : a_(a), b_(b) {}

protected:
    int overflow(int c) override {
        if (c == EOF) return !EOF;
        const bool ok = a_->sputc(static_cast<char>(c)) != EOF && b_->sputc(static_cast<char>(c)) != EOF;
        return ok ? c : EOF;
    }
    int sync() override { return a_->pubsync() | b_->pubsync(); }

private:
    std::streambuf* a_;
    std::streambuf* b_;
};

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "run";
    bool paper_scale = false;
    bool force = false;
    std::string boxes;
    bool no_amcm = false;
    std::vector<std::string> overrides;
};

struct Context {
    RunConfig cfg;
    fs::path root;
    fs::path dir;
    const Flags& flags;
    std::ostream& out;
    std::ofstream log_file{};
    std::unique_ptr<TeeBuf> tee{};
    std::unique_ptr<std::ostream> log{};
};

void require_stage(const fs::path& root, const std::string& command, const std::string& stage) {
    const auto path = stage == "gen-data" ? manifest_file(root) : checkpoint_file(root, stage);
    if (!fs::exists(path)) {
        throw DependencyError(command + " requires " + stage + " to have run first: missing " + path.string());
    }
}

// Checks every upstream stage before any work starts so one message names all that are missing.
void require_stages(const fs::path& root, const std::string& command, const std::vector<std::string>& stages) {
    std::string missing;
    for (const auto& stage : stages) {
        const auto path = stage == "gen-data" ? manifest_file(root) : checkpoint_file(root, stage);
        if (!fs::exists(path)) missing += (missing.empty() ? "" : ", ") + stage;
    }
    if (!missing.empty()) {
        throw DependencyError(command + " requires " + missing + " to have run first (run directory " + root.string() + ")");
    }
}

numcore::Checkpoint load_stage(const fs::path& root, const std::string& command, const std::string& stage) {
    require_stage(root, command, stage);
    return numcore::Checkpoint::load(checkpoint_file(root, stage));
}

void write_text(const fs::path& file, const std::string& text) {
    const auto tmp = fs::path(file.string() + ".tmp");
    {
        std::ofstream o(tmp);
        if (!o) throw IoError("cannot write " + file.string());
        o << text;
    }
    fs::rename(tmp, file);
}

void prepare_dir(Context& ctx) {
    if (fs::exists(ctx.dir) && !fs::is_empty(ctx.dir)) {
        if (!ctx.flags.force) {
            throw ConfigError(ctx.dir.string() + " already exists; run directories are append-only (pass --force to replace)");
        }
        fs::remove_all(ctx.dir);
    }
    fs::create_directories(ctx.dir);
    write_text(ctx.dir / "config.txt", ctx.cfg.canonical());
}

// Training progress goes to stdout and <stage>/log.txt.
std::ostream& start_log(Context& ctx) {
    ctx.log_file.open(ctx.dir / "log.txt");
    if (!ctx.log_file) throw IoError("cannot write " + (ctx.dir / "log.txt").string());
    ctx.tee = std::make_unique<TeeBuf>(ctx.out.rdbuf(), ctx.log_file.rdbuf());
    ctx.log = std::make_unique<std::ostream>(ctx.tee.get());
    return *ctx.log;
}

autoenc::TrainCommon train_common(Context& ctx) {
    autoenc::TrainCommon t;
    t.steps = ctx.cfg.get_size("steps");
    t.batch = ctx.cfg.get_size("batch");
    t.lr = ctx.cfg.get_double("lr");
    t.weight_decay = ctx.cfg.get_double("weight_decay");
    t.seed = ctx.cfg.get_u64("seed");
    t.log_every = ctx.cfg.get_size("log_every");
    t.checkpoint_every = ctx.cfg.get_size("checkpoint_every");
    t.log = &start_log(ctx);
    t.meta["config.command"] = ctx.cfg.command();
    t.meta["config.hash"] = ctx.cfg.hash();
    for (const auto& [k, v] : ctx.cfg.values()) t.meta["config." + k] = v;
    return t;
}

std::vector<dataio::LoadedSample> load_data(const Context& ctx, const std::string& split) {
    require_stage(ctx.root, ctx.cfg.command(), "gen-data");
    return dataio::load_split(dataio::DatasetManifest::load(manifest_file(ctx.root)), split);
}

std::vector<RGBAImage> all_frames(const std::vector<dataio::LoadedSample>& samples) {
    std::vector<RGBAImage> frames;
    for (const auto& s : samples) frames.insert(frames.end(), s.video.frames.begin(), s.video.frames.end());
    return frames;
}

// Every 4th frame of each eval video keeps the stage-1 metrics cheap.
std::vector<RGBAImage> eval_frames(const std::vector<dataio::LoadedSample>& samples) {
    std::vector<RGBAImage> frames;
    for (const auto& s : samples) {
        for (std::size_t i = 0; i < s.video.frames.size(); i += 4) frames.push_back(s.video.frames[i]);
    }
    return frames;
}

double tensor_psnr(const numcore::Tensor<float>& a, const numcore::Tensor<float>& b) {
    return evalkit::psnr(a.data(), b.data());
}

vdm::Autoencoders load_autoencoders(const Context& ctx) {
    const auto vae = load_stage(ctx.root, ctx.cfg.command(), "train-vae");
    const auto tvae = load_stage(ctx.root, ctx.cfg.command(), "train-tvae");
    return {autoenc::load_vae(vae), autoenc::load_tvae(tvae)};
}

vdm::LatentDataset latent_dataset(const vdm::Autoencoders& ae, const std::vector<dataio::LoadedSample>& samples) {
    std::vector<RGBAVideo> videos;
    std::vector<std::vector<float>> boxes;
    for (const auto& s : samples) {
        videos.push_back(s.video);
        boxes.push_back(s.boxes.flat());
    }
    return vdm::encode_dataset(ae, videos, boxes);
}

void write_json(const fs::path& file, const json& j) { write_text(file, j.dump(2) + "\n"); }

int cmd_gen_data(Context& ctx) {
    prepare_dir(ctx);
    dataio::DatasetSpec spec;
    spec.seed = ctx.cfg.get_u64("seed");
    spec.train = ctx.cfg.get_size("train_count");
    spec.eval = ctx.cfg.get_size("eval_count");
    spec.height = ctx.cfg.get_size("height");
    spec.width = ctx.cfg.get_size("width");
    spec.frames = ctx.cfg.get_size("frames");
    spec.soft_edge_probability = ctx.cfg.get_double("soft_edge_probability");
    const auto written = dataio::write_sprite_dataset(spec, ctx.dir);
    dataio::FilterOptions fo;
    fo.min_resolution = ctx.cfg.get_size("min_resolution");
    auto [kept, report] = dataio::filter_dataset(written, fo);
    kept.save(manifest_file(ctx.root));
    json removed = json::object();
    for (const auto& [rule, n] : report.removed) removed[rule] = n;
    json dropped = json::array();
    for (const auto& [id, rule] : report.dropped) dropped.push_back({{"id", id}, {"rule", rule}});
    write_json(ctx.dir / "filter_report.json", {{"config_hash", ctx.cfg.hash()},
                                                  {"input", report.input},
                                                  {"retained", report.retained},
                                                  {"removed", removed},
                                                  {"dropped", dropped}});
    ctx.out << "gen-data: " << report.retained << " of " << report.input << " videos retained -> "
            << manifest_file(ctx.root).string() << '\n';
    return kExitOk;
}

int cmd_train_vae(Context& ctx) {
    const auto train = load_data(ctx, "train");
    const auto eval = load_data(ctx, "eval");
    prepare_dir(ctx);
    autoenc::VaeTrainConfig c;
    c.train = train_common(ctx);
    c.kl_weight = ctx.cfg.get_double("kl_weight");
    c.green_fraction = ctx.cfg.get_double("green_fraction");
    c.model.latent_channels = ctx.cfg.get_size("latent_channels");
    c.model.base_channels = ctx.cfg.get_size("base_channels");
    c.model.mid_channels = ctx.cfg.get_size("mid_channels");
    const auto result = autoenc::train_vae(autoenc::smooth_all(all_frames(train)), c, checkpoint_file(ctx.root, "train-vae"));
    const auto x = autoenc::rgb_tensor<float>(autoenc::smooth_all(eval_frames(eval)));
    numcore::NoGradGuard no_grad;
    const double p = tensor_psnr(result.vae.decode(result.vae.encode(x).mean), x);
    write_json(ctx.dir / "metrics.json",
               {{"config_hash", ctx.cfg.hash()}, {"final_loss", result.history.loss.back()}, {"eval_psnr_db", p}});
    ctx.out << "train-vae: eval PSNR " << p << " dB\n";
    return kExitOk;
}

int cmd_train_tvae(Context& ctx) {
    const auto train = load_data(ctx, "train");
    const auto eval = load_data(ctx, "eval");
    const auto vae = autoenc::load_vae(load_stage(ctx.root, ctx.cfg.command(), "train-vae"));
    prepare_dir(ctx);
    autoenc::TvaeTrainConfig c;
    c.train = train_common(ctx);
    c.lambda = ctx.cfg.get_double("lambda");
    c.opaque_fraction = ctx.cfg.get_double("opaque_fraction");
    c.model.latent_channels = vae.config().latent_channels;
    const auto enc = ctx.cfg.get_size_list("encoder_channels"), dec = ctx.cfg.get_size_list("decoder_channels");
    if (enc.size() != 3 || dec.size() != 3) throw ConfigError("encoder_channels and decoder_channels take 3 widths each");
    std::copy(enc.begin(), enc.end(), c.model.encoder_channels.begin());
    std::copy(dec.begin(), dec.end(), c.model.decoder_channels.begin());
    const auto result = autoenc::train_tvae(vae, autoenc::make_tvae_samples(all_frames(train)), c,
                                            checkpoint_file(ctx.root, "train-tvae"));
    const auto frames = eval_frames(eval);
    const auto smooth = autoenc::rgb_tensor<float>(autoenc::smooth_all(frames));
    numcore::NoGradGuard no_grad;
    const auto pass = autoenc::tvae_forward(vae, result.tvae, autoenc::rgb_tensor<float>(frames), smooth,
                                            autoenc::alpha_tensor<float>(frames));
    const double base = tensor_psnr(vae.decode(vae.encode(smooth).mean), smooth);
    const double adjusted = tensor_psnr(pass.rgb_hat, smooth);
    const double iou = evalkit::alpha_iou(pass.out.alpha.data(), autoenc::alpha_tensor<float>(frames).data());
    write_json(ctx.dir / "metrics.json", {{"config_hash", ctx.cfg.hash()},
                                          {"final_loss", result.history.loss.back()},
                                          {"eval_alpha_iou", iou},
                                          {"eval_psnr_vae_db", base},
                                          {"eval_psnr_adjusted_db", adjusted},
                                          {"psnr_degradation_db", base - adjusted}});
    ctx.out << "train-tvae: eval alpha IoU " << iou << ", PSNR degradation " << base - adjusted << " dB\n";
    return kExitOk;
}

int cmd_train_vdm(Context& ctx) {
    const auto train = load_data(ctx, "train");
    const auto ae = load_autoencoders(ctx);
    prepare_dir(ctx);
    const auto data = latent_dataset(ae, train);
    vdm::VdmTrainConfig c;
    c.train = train_common(ctx);
    c.model.frames = data.latents.at(0).dim(0);
    c.model.latent_channels = data.latents.at(0).dim(1);
    c.model.base_channels = ctx.cfg.get_size("base_channels");
    c.model.groups = ctx.cfg.get_size("groups");
    c.model.time_dim = ctx.cfg.get_size("time_dim");
    c.model.timesteps = ctx.cfg.get_size("timesteps");
    c.model.sampler_steps = ctx.cfg.get_size("sampler_steps");
    c.beta_start = ctx.cfg.get_double("beta_start");
    c.beta_end = ctx.cfg.get_double("beta_end");
    const auto result = vdm::train_vdm(data, c, checkpoint_file(ctx.root, "train-vdm"));
    write_json(ctx.dir / "metrics.json", {{"config_hash", ctx.cfg.hash()},
                                          {"final_loss", result.history.loss.back()},
                                          {"latent_scale", result.model.latent_scale}});
    ctx.out << "train-vdm: final loss " << result.history.loss.back() << '\n';
    return kExitOk;
}

int cmd_train_amcm(Context& ctx) {
    const auto train = load_data(ctx, "train");
    const auto ae = load_autoencoders(ctx);
    const auto backbone = vdm::load_vdm(load_stage(ctx.root, ctx.cfg.command(), "train-vdm"));
    prepare_dir(ctx);
    amcm::AmcmTrainConfig c;
    c.train = train_common(ctx);
    const auto result = amcm::train_amcm(backbone, latent_dataset(ae, train), c, checkpoint_file(ctx.root, "train-amcm"));
    write_json(ctx.dir / "metrics.json", {{"config_hash", ctx.cfg.hash()}, {"final_loss", result.history.loss.back()}});
    ctx.out << "train-amcm: final loss " << result.history.loss.back() << '\n';
    return kExitOk;
}

RGBAImage load_condition(const std::string& path) {
    if (fs::is_directory(path)) return dataio::load_rgba_sequence(path).frames.at(0);
    if (!fs::exists(path)) throw IoError("conditioned image not found: " + path);
    return dataio::load_rgba_image(path);
}

int cmd_generate(Context& ctx) {
    const auto ae = load_autoencoders(ctx);
    const auto backbone = vdm::load_vdm(load_stage(ctx.root, ctx.cfg.command(), "train-vdm"));
    std::optional<amcm::Amcm<float>> module;
    if (!ctx.flags.no_amcm) module = amcm::load_amcm(load_stage(ctx.root, ctx.cfg.command(), "train-amcm"));
    RGBAImage cond;
    std::string prompt = ctx.cfg.get("prompt");
    if (ctx.cfg.get("image").empty()) {
        const auto eval = load_data(ctx, "eval");
        cond = eval.at(0).video.frames.at(0);
        if (prompt.empty()) prompt = eval.at(0).video.caption;
    } else {
        cond = load_condition(ctx.cfg.get("image"));
    }
    std::optional<amcm::BoxSequence> override_boxes;
    if (!ctx.flags.boxes.empty()) override_boxes = amcm::read_box_file(ctx.flags.boxes);
    const std::size_t frames = backbone.unet.config().frames;
    const auto boxes = amcm::inference_boxes(cond.alpha, cond.height, cond.width, frames, override_boxes);
    prepare_dir(ctx);
    std::optional<amcm::BoxConstraint<float>> hook;
    if (module) hook.emplace(*module, amcm::box_tensor(boxes.boxes));
    vdm::GenerateOptions opts;
    opts.steps = ctx.cfg.get_size("sampler_steps");
    opts.seed = ctx.cfg.get_u64("seed");
    const auto gen = vdm::generate_video(ae, backbone, cond, prompt, hook ? &*hook : nullptr, opts);
    dataio::save_rgba_sequence(gen.video, ctx.dir / "frames");
    RGBAVideo preview = gen.video;
    for (auto& f : preview.frames) {
        f.rgb = evalkit::composite_over(f, evalkit::kBlack).rgb;
        std::fill(f.alpha.begin(), f.alpha.end(), 1.0f);
    }
    dataio::save_rgba_sequence(preview, ctx.dir / "preview");
    amcm::write_box_file(ctx.dir / "boxes.txt", boxes.boxes);
    json meta{{"config_hash", ctx.cfg.hash()}, {"prompt", prompt},  {"seed", opts.seed},
              {"sampler_steps", opts.steps},   {"amcm", module.has_value()}, {"frames", frames}};
    if (boxes.warning) meta["warning"] = *boxes.warning;
    write_json(ctx.dir / "meta.json", meta);
    ctx.out << "generate: " << frames << " frames -> " << (ctx.dir / "frames").string() << '\n';
    return kExitOk;
}

int cmd_evaluate(Context& ctx) {
    const auto gen = stage_dir(ctx.root, "generate");
    const std::string video_dir = ctx.cfg.get("video").empty() ? (gen / "frames").string() : ctx.cfg.get("video");
    const std::string box_path = ctx.cfg.get("boxes").empty() ? (gen / "boxes.txt").string() : ctx.cfg.get("boxes");
    if (ctx.cfg.get("video").empty() && !fs::exists(video_dir)) {
        throw DependencyError("evaluate requires generate to have run first: missing " + video_dir);
    }
    const auto video = dataio::load_rgba_sequence(video_dir);
    const auto boxes = amcm::read_box_file(box_path);
    json m{{"config_hash", ctx.cfg.hash()},
           {"video", video_dir},
           {"aer", evalkit::artifact_escape_ratio(video, boxes, ctx.cfg.get_double("dilation"))},
           {"fringe", evalkit::fringe_score(video)}};
    if (!ctx.cfg.get("reference").empty()) {
        const auto ref = dataio::load_rgba_sequence(ctx.cfg.get("reference"));
        m["alpha_iou"] = evalkit::alpha_iou(video, ref);
        m["psnr_db"] = evalkit::composite_psnr(video, ref);
    }
    prepare_dir(ctx);
    write_json(ctx.dir / "metrics.json", m);
    ctx.out << m.dump(2) << '\n';
    return kExitOk;
}

int cmd_ablate(Context& ctx) {
    const auto eval = load_data(ctx, "eval");
    const auto ae = load_autoencoders(ctx);
    std::optional<vdm::VideoDiffusion> backbone;
    std::optional<amcm::Amcm<float>> module;
    if (fs::exists(checkpoint_file(ctx.root, "train-vdm"))) backbone = vdm::load_vdm(numcore::Checkpoint::load(checkpoint_file(ctx.root, "train-vdm")));
    if (fs::exists(checkpoint_file(ctx.root, "train-amcm"))) module = amcm::load_amcm(numcore::Checkpoint::load(checkpoint_file(ctx.root, "train-amcm")));
    auto methods = ctx.cfg.get_list("methods");
    if (ctx.flags.no_amcm) std::erase(methods, std::string(evalkit::kMethodWithAmcm));
    if (ctx.cfg.get_bool("baseline")) {
        for (const char* m : {evalkit::kMethodChromaKey, evalkit::kMethodDirect}) {
            if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
        }
    }
    if (methods.empty()) throw ConfigError("ablate: no methods requested");
    evalkit::AblationInputs in;
    in.autoencoders = &ae;
    in.backbone = backbone ? &*backbone : nullptr;
    in.amcm = module ? &*module : nullptr;
    in.sampler_steps = ctx.cfg.get_size("sampler_steps");
    in.seed = ctx.cfg.get_u64("seed");
    in.dilation_px = ctx.cfg.get_double("dilation");
    const std::size_t count = ctx.cfg.get_size("eval_count");
    for (std::size_t i = 0; i < eval.size() && (count == 0 || i < count); ++i) in.eval.push_back({eval[i].video, "eval_" + std::to_string(i)});
    prepare_dir(ctx);
    const auto report = evalkit::ablation_report(in, methods, manifest_file("").generic_string(), ctx.cfg.hash());
    write_text(ctx.dir / "report.jsonl", report.jsonl());
    write_text(ctx.dir / "report.txt", report.table());
    ctx.out << report.table();
    const auto missing = report.missing();
    if (!missing.empty()) {
        std::string names;
        for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
        throw DependencyError("no checkpoint for requested method(s) " + names +
                              " (train-vdm / train-amcm); partial report written");
    }
    return kExitOk;
}

int dispatch(const std::string& command, const Flags& flags, std::ostream& out) {
    RunConfig cfg(command);
    if (flags.paper_scale) cfg.apply_paper_scale();
    if (!flags.config.empty()) cfg.load_file(flags.config);
    if (flags.seed) {
        if (!cfg.has("seed")) throw ConfigError(command + " takes no seed");
        cfg.set("seed", std::to_string(*flags.seed));
    }
    for (const auto& kv : flags.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("expected key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!flags.boxes.empty() && command != "generate") throw ConfigError("--boxes only applies to generate");
    if (flags.no_amcm && command != "generate" && command != "ablate") {
        throw ConfigError("--no-amcm only applies to generate and ablate");
    }
    static const std::map<std::string, std::vector<std::string>> upstream = {
        {"train-vae", {"gen-data"}},
        {"train-tvae", {"gen-data", "train-vae"}},
        {"train-vdm", {"gen-data", "train-vae", "train-tvae"}},
        {"train-amcm", {"gen-data", "train-vae", "train-tvae", "train-vdm"}},
        {"generate", {"train-vae", "train-tvae", "train-vdm"}},
        {"ablate", {"gen-data", "train-vae", "train-tvae"}},
    };
    if (const auto it = upstream.find(command); it != upstream.end()) require_stages(flags.out, command, it->second);
    if (command == "generate" && !flags.no_amcm) require_stages(flags.out, command, {"train-amcm"});
    Context ctx{std::move(cfg), flags.out, stage_dir(flags.out, command), flags, out};

    if (command == "gen-data") return cmd_gen_data(ctx);
    if (command == "generate") return cmd_generate(ctx);
    if (command == "evaluate") return cmd_evaluate(ctx);
    if (command == "ablate") return cmd_ablate(ctx);

    if (command == "train-vae") return cmd_train_vae(ctx);
    if (command == "train-tvae") return cmd_train_tvae(ctx);
    if (command == "train-vdm") return cmd_train_vdm(ctx);
    if (command == "train-amcm") return cmd_train_amcm(ctx);
    throw ConfigError("unknown command '" + command + "'");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Transparent video diffusion toolkit"};
    app.require_subcommand(1);
    Flags flags;
    for (const auto& name : commands()) {
        std::string help = "keys:";
        for (const auto& k : keys_for(name)) help += "\n  " + k.key + " (default '" + k.default_value + "'): " + k.help;
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config, "key=value config file");
        sub->add_option("--seed", flags.seed, "seed override");
        sub->add_option("--out", flags.out, "run directory")->capture_default_str();
        sub->add_flag("--paper-scale", flags.paper_scale, "start from the published hyperparameters");
        sub->add_flag("--force", flags.force, "replace an existing stage directory");
        if (name == "generate") sub->add_option("--boxes", flags.boxes, "box override file (i x0 y0 x1 y1 per line)");
        if (name == "generate" || name == "ablate") sub->add_flag("--no-amcm", flags.no_amcm, "run the backbone without box constraints");
        sub->add_option("overrides", flags.overrides, "key=value overrides");
    }
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return dispatch(command, flags, out);
    } catch (const ConfigError& e) {
        err << command << ": usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DependencyError& e) {
        err << command << ": " << e.what() << '\n';
        return kExitDependency;
    } catch (const NumericError& e) {
        err << command << ": numeric failure: " << e.what() << " (last checkpoint kept)\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << command << ": error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace tvdm::cli
