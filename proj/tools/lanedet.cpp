// Command-line front end: detect / synth / bench.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lanekit/artifacts.hpp"
#include "lanekit/bench.hpp"
#include "lanekit/config.hpp"
#include "lanekit/image_io.hpp"
#include "lanekit/pipeline.hpp"
#include "lanekit/synth.hpp"

namespace {

using namespace lanekit;

GrayImage load_gray(const std::string& path) {
    const auto ext = std::filesystem::path(path).extension().string();
    if (ext == ".pgm" || ext == ".PGM") {
        int maxval = 0;
        const auto img = read_pgm(path, &maxval);
        GrayImage out(img.width, img.height, 0);
        for (size_t i = 0; i < img.data.size(); ++i)
            out.data[i] = static_cast<Real>(img.data[i]) / maxval;
        return out;
    }
    return read_png_gray(path);
}

PipelineConfig make_config(const std::string& config_path,
                           const std::vector<std::string>& overrides, int threads) {
    PipelineConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error("--set expects key=value, got '" + kv + "'");
        apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (threads > 0) cfg.threads = threads;
    validate_config(cfg);
    return cfg;
}

int cmd_detect(const std::string& left_path, const std::string& right_path,
               const std::string& config_path, const std::string& out_dir, bool emit_all,
               int threads, const std::vector<std::string>& overrides) {
    const PipelineConfig cfg = make_config(config_path, overrides, threads);
    const GrayImage left = load_gray(left_path);
    const GrayImage right = load_gray(right_path);
    const PipelineResult result = run_pipeline(left, right, cfg);
    emit_artifacts(result, left, out_dir, emit_all);

    const PipelineReport& rep = result.report;
    std::printf("%dx%d, %d thread(s), %.1f ms total\n", rep.width, rep.height, rep.threads,
                rep.total_ms);
    std::printf("road: beta = [%.4g, %.4g, %.4g], horizon row %d%s\n", rep.beta[0], rep.beta[1],
                rep.beta[2], rep.horizon, rep.horizon_in_range ? "" : " (clamped)");
    std::printf("lanes: %d (threshold %.3f)\n", rep.lane_count, rep.tr_lpv_used);
    std::printf("artifacts written to %s\n", out_dir.c_str());
    return 0;
}

int cmd_synth(const std::string& out_dir, std::uint64_t seed, int width, int height) {
    SceneParams sp;
    sp.width = width;
    sp.height = height;
    sp.rng_seed = seed;
    sp.noise_sigma = 0.02;
    const SyntheticScene scene = gen_scene(sp);

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto p = [&](const char* f) { return (fs::path(out_dir) / f).string(); };

    write_png_gray(p("left.png"), scene.left);
    write_png_gray(p("right.png"), scene.right);
    detail::write_disparity_pgm(p("true_disparity.pgm"), scene.true_disparity);

    nlohmann::json j;
    j["width"] = sp.width;
    j["height"] = sp.height;
    j["rng_seed"] = seed;
    j["beta"] = {sp.beta[0], sp.beta[1], sp.beta[2]};
    j["gamma"] = {sp.gamma[0], sp.gamma[1], sp.gamma[2], sp.gamma[3], sp.gamma[4]};
    j["d_max"] = sp.d_max;
    j["horizon"] = scene.horizon;
    j["lanes"] = nlohmann::json::array();
    for (const auto& lane : scene.true_lanes) {
        nlohmann::json jl;
        jl["bottom_col"] = lane.bottom_col;
        jl["polyline"] = nlohmann::json::array();
        for (const auto& [v, u] : lane.polyline) jl["polyline"].push_back({v, u});
        j["lanes"].push_back(std::move(jl));
    }
    std::ofstream out(p("ground_truth.json"));
    if (!out) throw Error("cannot open ground_truth.json");
    out << j.dump(2) << "\n";

    std::printf("synthetic scene (seed %llu) written to %s\n",
                static_cast<unsigned long long>(seed), out_dir.c_str());
    return 0;
}

int cmd_bench(const std::string& config_path, int width, int height, int reps,
              const std::vector<std::string>& overrides) {
    const PipelineConfig cfg = make_config(config_path, overrides, 0);
    const BenchResult b = run_bench(cfg, width, height, reps);

    std::printf("block matching, %dx%d, %d rep(s)%s\n", b.width, b.height, b.reps,
                b.low_confidence ? " [low confidence]" : "");
    std::printf("  naive : %9.2f ms\n", b.naive_ms);
    std::printf("  memo  : %9.2f ms\n", b.memo_ms);
    std::printf("  speedup eta = %.2fx, maps %s\n", b.eta,
                b.identical ? "identical" : "DIFFER");
    std::printf("pipeline stages (single thread):\n");
    for (const auto& s : b.stages)
        std::printf("  %2d %-28s %9.2f ms\n", s.stage, s.name.c_str(), s.ms);
    std::printf("  total %38.2f ms\n", b.pipeline_total_ms);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stereo-vision lane detection"};
    app.require_subcommand(1);

    std::string left_path, right_path, config_path, out_dir;
    bool emit_all = false;
    int threads = 0;
    std::vector<std::string> overrides;

    auto* detect = app.add_subcommand("detect", "run the pipeline on a stereo pair");
    detect->add_option("--left", left_path, "left image (png or pgm)")->required();
    detect->add_option("--right", right_path, "right image (png or pgm)")->required();
    detect->add_option("--config", config_path, "key=value config file");
    detect->add_option("--out-dir", out_dir, "artifact directory")->required();
    detect->add_flag("--emit-all", emit_all, "write every intermediate stage");
    detect->add_option("--threads", threads, "worker threads");
    detect->add_option("--set", overrides, "override a config key (key=value)");

    std::uint64_t seed = 1;
    int width = 640, height = 360;
    auto* synth = app.add_subcommand("synth", "generate a synthetic stereo scene");
    synth->add_option("--out-dir", out_dir, "output directory")->required();
    synth->add_option("--seed", seed, "scene seed");
    synth->add_option("--width", width, "scene width");
    synth->add_option("--height", height, "scene height");

    int bwidth = 320, bheight = 240, reps = 3;
    auto* bench = app.add_subcommand("bench", "time the block matchers and stages");
    bench->add_option("--config", config_path, "key=value config file");
    bench->add_option("--width", bwidth, "scene width");
    bench->add_option("--height", bheight, "scene height");
    bench->add_option("--reps", reps, "repetitions per matcher");
    bench->add_option("--set", overrides, "override a config key (key=value)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (detect->parsed())
            return cmd_detect(left_path, right_path, config_path, out_dir, emit_all, threads,
                              overrides);
        if (synth->parsed()) return cmd_synth(out_dir, seed, width, height);
        if (bench->parsed()) return cmd_bench(config_path, bwidth, bheight, reps, overrides);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
