#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "tvdm/amcm/boxes.hpp"
#include "tvdm/cli/app.hpp"
#include "tvdm/cli/config.hpp"
#include "tvdm/numcore/errors.hpp"

namespace fs = std::filesystem;
using namespace tvdm;
using namespace tvdm::cli;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result tvdm_run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("tvdm_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    return dir;
}

const std::vector<std::string> kMicroVdm{"base_channels=8", "groups=2", "time_dim=16", "log_every=0"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TEST_CASE("config keys, files, presets and hashing") {
    RunConfig c("train-tvae");
    CHECK(c.get("lambda") == "1");
    CHECK_THROWS_AS(c.set("lamda", "2"), ConfigError);
    CHECK_THROWS_AS(RunConfig("train-everything"), ConfigError);

    const auto file = fresh_dir("cfg");
    {
        std::ofstream o(file);
        o << "# stage 1\nsteps = 12\n\nlambda=0.5  # weaker identity\n";
    }
    c.load_file(file);
    CHECK(c.get_size("steps") == 12);
    CHECK(c.get_double("lambda") == 0.5);
    {
        std::ofstream o(file);
        o << "colour=red\n";
    }
    CHECK_THROWS_AS(c.load_file(file), ConfigError);

    // The canonical text reloads to the same configuration and hash.
    {
        std::ofstream o(file);
        o << c.canonical();
    }
    RunConfig d("train-tvae");
    d.load_file(file);
    CHECK(d.values() == c.values());
    CHECK(d.hash() == c.hash());
    d.set("seed", "1");
    CHECK(d.hash() != c.hash());
    fs::remove(file);

    RunConfig p("train-amcm");
    p.apply_paper_scale();
    CHECK(p.get_double("lr") == 3e-5);
    CHECK(p.get_size("batch") == 16);
    p.set("batch", "x");
    CHECK_THROWS_AS(p.get_size("batch"), ConfigError);
}

TEST_CASE("usage and dependency exit codes") {
    const auto dir = fresh_dir("deps");
    CHECK(tvdm_run({}).code == kExitUsage);
    CHECK(tvdm_run({"train-vae", "--out", dir.string(), "--bogus"}).code == kExitUsage);
    const auto amcm = tvdm_run({"train-amcm", "--out", dir.string()});
    CHECK(amcm.code == kExitDependency);
    CHECK(amcm.err.find("train-vdm") != std::string::npos);
    CHECK(tvdm_run({"train-vae", "--out", dir.string(), "colour=red"}).code == kExitUsage);
    CHECK(tvdm_run({"gen-data", "--out", dir.string(), "--boxes", "b.txt"}).code == kExitUsage);
    fs::remove_all(dir);
}

TEST_CASE("micro pipeline runs end to end, reproducibly") {
    const auto dir = fresh_dir("smoke");
    const std::vector<std::string> out{"--out", dir.string()};
    auto ok = [](const Result& r) {
        INFO(r.err);
        REQUIRE(r.code == kExitOk);
    };
    ok(tvdm_run(with({"gen-data", "train_count=12", "eval_count=3", "height=16", "width=16", "frames=4"}, out)));
    ok(tvdm_run(with({"train-vae", "steps=200", "log_every=0"}, out)));
    ok(tvdm_run(with({"train-tvae", "steps=200", "log_every=0"}, out)));
    ok(tvdm_run(with(with({"train-vdm", "steps=200"}, kMicroVdm), out)));
    ok(tvdm_run(with({"train-amcm", "steps=200", "log_every=0"}, out)));
    ok(tvdm_run(with({"generate", "sampler_steps=10"}, out)));
    ok(tvdm_run(with({"evaluate"}, out)));
    ok(tvdm_run(with({"ablate", "sampler_steps=10"}, out)));

    // Two-row report with the config hash on every line.
    std::istringstream report(slurp(dir / "ablate" / "report.jsonl"));
    std::vector<nlohmann::json> rows;
    for (std::string line; std::getline(report, line);) rows.push_back(nlohmann::json::parse(line));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].at("method") == "without-amcm");
    CHECK(rows[1].at("method") == "with-amcm");
    CHECK(rows[0].at("config_hash").get<std::string>().size() == 16);

    CHECK(fs::exists(dir / "generate" / "frames" / "frame_0003.png"));
    CHECK(fs::exists(dir / "generate" / "preview" / "frame_0000.png"));
    CHECK(slurp(dir / "train-vdm" / "config.txt").find("groups=2") != std::string::npos);

    // Append-only stage directories; --force re-runs reproduce the same bytes.
    CHECK(tvdm_run(with({"generate", "sampler_steps=10"}, out)).code == kExitUsage);
    const auto vdm = slurp(dir / "train-vdm" / "checkpoint.tvdm");
    const auto frame = slurp(dir / "generate" / "frames" / "frame_0002.png");
    ok(tvdm_run(with(with({"train-vdm", "--force", "steps=200"}, kMicroVdm), out)));
    ok(tvdm_run(with({"generate", "--force", "sampler_steps=10"}, out)));
    CHECK(slurp(dir / "train-vdm" / "checkpoint.tvdm") == vdm);
    CHECK(slurp(dir / "generate" / "frames" / "frame_0002.png") == frame);

    // Box override and backbone-only generation.
    {
        std::ofstream b(dir / "boxes.txt");
        for (int i = 0; i < 4; ++i) b << i << " 0.1 0.1 0.5 0.5\n";
    }
    ok(tvdm_run(with({"generate", "--force", "--no-amcm", "--boxes", (dir / "boxes.txt").string(), "sampler_steps=5"}, out)));
    const auto used = amcm::read_box_file(dir / "generate" / "boxes.txt");
    REQUIRE(used.size() == 4);
    CHECK(used.boxes[2].x_max == 0.5);
    CHECK(nlohmann::json::parse(slurp(dir / "generate" / "meta.json")).at("amcm") == false);

    // A missing requested method yields a partial report and a nonzero exit.
    fs::remove_all(dir / "train-amcm");
    const auto partial = tvdm_run(with({"ablate", "--force", "sampler_steps=5"}, out));
    CHECK(partial.code == kExitDependency);
    CHECK(slurp(dir / "ablate" / "report.txt").find("n/a") != std::string::npos);
    fs::remove_all(dir);
}
