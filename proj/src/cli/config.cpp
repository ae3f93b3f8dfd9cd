#include "tvdm/cli/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tvdm/numcore/errors.hpp"

namespace tvdm::cli {

namespace {

const std::vector<KeySpec> kTrainCommon = {
    {"seed", "0", "random seed"},
    {"batch", "8", "batch size"},
    {"lr", "1e-3", "AdamW learning rate"},
    {"weight_decay", "0", "AdamW decoupled weight decay"},
    {"log_every", "100", "steps between log lines (0: silent)"},
    {"checkpoint_every", "0", "steps between intermediate checkpoints (0: final only)"},
};

std::vector<KeySpec> with_common(std::vector<KeySpec> keys, const std::vector<KeySpec>& overrides = {}) {
    for (const auto& c : kTrainCommon) {
        bool present = false;
        for (const auto& k : keys) present = present || k.key == c.key;
        if (!present) keys.push_back(c);
    }
    for (const auto& o : overrides) {
        for (auto& k : keys) {
            if (k.key == o.key) k = o;
        }
    }
    return keys;
}

const std::map<std::string, std::vector<KeySpec>>& table() {
    static const std::map<std::string, std::vector<KeySpec>> t = {
        {"gen-data",
         {{"seed", "0", "dataset seed"},
          {"train_count", "512", "training videos"},
          {"eval_count", "64", "eval videos"},
          {"height", "32", "frame height"},
          {"width", "32", "frame width"},
          {"frames", "8", "frames per video"},
          {"soft_edge_probability", "0.25", "share of sprites with soft edges"},
          {"min_resolution", "16", "filter: minimum frame side"}}},
        {"train-vae", with_common({{"steps", "600", "optimizer steps"},
                                   {"batch", "16", "batch size"},
                                   {"kl_weight", "1e-6", "weight of the KL term"},
                                   {"green_fraction", "0.25", "share of samples composited over key green"},
                                   {"latent_channels", "4", "latent channels"},
                                   {"base_channels", "32", "first encoder width"},
                                   {"mid_channels", "64", "inner encoder width"}})},
        {"train-tvae", with_common({{"steps", "2500", "optimizer steps"},
                                    {"lambda", "1", "weight of the identity loss"},
                                    {"opaque_fraction", "0.1", "share of fully opaque training copies"},
                                    {"encoder_channels", "16,32,64", "alpha encoder widths"},
                                    {"decoder_channels", "16,32,64", "transparent decoder widths"}})},
        {"train-vdm", with_common({{"steps", "3000", "optimizer steps"},
                                   {"base_channels", "32", "U-Net width"},
                                   {"groups", "8", "group-norm groups"},
                                   {"time_dim", "128", "timestep embedding width"},
                                   {"timesteps", "1000", "diffusion steps T"},
                                   {"beta_start", "1e-4", "first beta"},
                                   {"beta_end", "2e-2", "last beta"},
                                   {"sampler_steps", "50", "default DDIM steps"}})},
        {"train-amcm", with_common({{"steps", "1500", "optimizer steps"}})},
        {"generate",
         {{"seed", "0", "sampling seed"},
          {"image", "", "conditioned RGBA image (PNG file or frame directory); default: first eval video"},
          {"prompt", "", "text prompt; default: the eval video's caption"},
          {"sampler_steps", "50", "DDIM steps"}}},
        {"evaluate",
         {{"video", "", "RGBA frame directory; default: the generate output"},
          {"reference", "", "optional ground-truth frame directory"},
          {"boxes", "", "constraint box file; default: the generate output's boxes"},
          {"dilation", "2", "box dilation in pixels"}}},
        {"ablate",
         {{"seed", "0", "sampling seed of eval video 0 (video i uses seed + i)"},
          {"eval_count", "64", "eval videos (0: all)"},
          {"sampler_steps", "50", "DDIM steps"},
          {"methods", "without-amcm,with-amcm", "report rows"},
          {"baseline", "false", "also report the chroma-key baseline and direct reconstruction"},
          {"dilation", "2", "box dilation in pixels"}}},
    };
    return t;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

const std::vector<KeySpec>& keys_for(const std::string& command) {
    const auto it = table().find(command);
    if (it == table().end()) throw ConfigError("unknown command '" + command + "'");
    return it->second;
}

std::vector<std::string> commands() {
    return {"gen-data", "train-vae", "train-tvae", "train-vdm", "train-amcm", "generate", "evaluate", "ablate"};
}

RunConfig::RunConfig(std::string command) : command_(std::move(command)) {
    for (const auto& k : keys_for(command_)) values_[k.key] = k.default_value;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        std::string known;
        for (const auto& [k, v] : values_) known += (known.empty() ? "" : ", ") + k;
        throw ConfigError("unknown key '" + key + "' for " + command_ + " (accepted: " + known + ")");
    }
    it->second = value;
}

void RunConfig::load_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file " + file.string());
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        const auto body = trim(line.substr(0, line.find('#')));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(file.string() + ":" + std::to_string(n) + ": expected key=value");
        }
        set(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    }
}

void RunConfig::apply_paper_scale() {
    if (command_ == "gen-data") {
        set("height", "384");
        set("width", "384");
        set("frames", "16");
        set("min_resolution", "100");
    } else if (command_ == "train-tvae") {
        set("lr", "3e-5");
        set("batch", "4");
        set("steps", "100000");
        set("lambda", "1");
    } else if (command_ == "train-amcm") {
        set("lr", "3e-5");
        set("batch", "16");
        set("steps", "3000");
    }
}

bool RunConfig::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& RunConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("key '" + key + "' is not defined for " + command_);
    return it->second;
}

std::size_t RunConfig::get_size(const std::string& key) const {
    const auto& v = get(key);
    std::size_t pos = 0;
    try {
        if (!v.empty() && v[0] != '-') {
            const auto n = std::stoull(v, &pos);
            if (pos == v.size()) return static_cast<std::size_t>(n);
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "' expects a non-negative integer, got '" + v + "'");
}

double RunConfig::get_double(const std::string& key) const {
    const auto& v = get(key);
    std::size_t pos = 0;
    try {
        const double d = std::stod(v, &pos);
        if (pos == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "' expects a number, got '" + v + "'");
}

std::uint64_t RunConfig::get_u64(const std::string& key) const { return static_cast<std::uint64_t>(get_size(key)); }

bool RunConfig::get_bool(const std::string& key) const {
    const auto& v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + key + "' expects true or false, got '" + v + "'");
}

std::vector<std::string> RunConfig::get_list(const std::string& key) const {
    std::vector<std::string> out;
    std::istringstream in(get(key));
    for (std::string item; std::getline(in, item, ',');) {
        if (auto t = trim(item); !t.empty()) out.push_back(t);
    }
    return out;
}

std::vector<std::size_t> RunConfig::get_size_list(const std::string& key) const {
    std::vector<std::size_t> out;
    for (const auto& item : get_list(key)) {
        try {
            out.push_back(std::stoul(item));
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "' expects comma-separated integers, got '" + get(key) + "'");
        }
    }
    return out;
}

std::string RunConfig::canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
    return out;
}

std::string RunConfig::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : command_ + "\n" + canonical()) h = (h ^ c) * 1099511628211ULL;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace tvdm::cli
