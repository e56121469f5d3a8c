#pragma once

#include <algorithm>
#include <chrono>
#include <utility>
#include <vector>

#include "lanekit/pipeline.hpp"
#include "lanekit/stereo.hpp"
#include "lanekit/synth.hpp"

namespace lanekit {

struct BenchResult {
    int width = 0, height = 0, reps = 0;
    double naive_ms = 0, memo_ms = 0;  // medians over reps
    Real eta = 0;                      // naive / memo speedup
    bool identical = false;            // the two matchers agree map-for-map
    bool low_confidence = false;       // fewer than 3 repetitions
    std::vector<StageTiming> stages;   // one full pipeline run
    double pipeline_total_ms = 0;
};

namespace detail {

template <class Fn>
inline double time_ms(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

inline double median(std::vector<double> xs) {
    std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
    return xs[xs.size() / 2];
}

}  // namespace detail

// Memoisation benchmark on a synthetic scene plus a per-stage table from one
// pipeline run. The scene geometry is sized so the road disparity stays
// inside the configured search range.
inline BenchResult run_bench(const PipelineConfig& cfg, int width = 320, int height = 240,
                             int reps = 3) {
    if (reps < 1) throw Error("bench: need at least one repetition");
    validate_config(cfg);

    SceneParams sp;
    sp.width = width;
    sp.height = height;
    sp.lane_bottoms = {Real(width) / 3, Real(2 * width) / 3};
    sp.d_max = cfg.d_max;
    sp.rng_seed = cfg.rng_seed;
    const SyntheticScene scene = gen_scene(sp);

    // Clamp the search range to what this scene can actually contain; small
    // frames reach only a few disparity levels and a far larger range would
    // leave the profile fit with almost no genuine path points.
    const int d_scene = std::min(
        cfg.d_max,
        static_cast<int>(std::llround(road_f(sp.beta, Real(height - 1)))) + 4);

    StereoConfig sc;
    sc.rho = cfg.rho;
    sc.d_min = 0;
    sc.d_max = d_scene;
    sc.tau = cfg.tau;
    sc.tr_lrc = cfg.tr_lrc;
    sc.sigma_floor = cfg.sigma_floor;
    sc.threads = 1;

    BenchResult out;
    out.width = width;
    out.height = height;
    out.reps = reps;
    out.low_confidence = reps < 3;

    const BlockStats sl = precompute_stats(scene.left, cfg.rho);
    const BlockStats sr = precompute_stats(scene.right, cfg.rho);

    DisparityMap naive_map, memo_map;
    std::vector<double> t_naive, t_memo;
    for (int i = 0; i < reps; ++i) {
        t_naive.push_back(detail::time_ms(
            [&] { naive_map = match_full_naive(scene.left, scene.right, RefView::left, sc); }));
        t_memo.push_back(detail::time_ms(
            [&] { memo_map = match_full_memo(scene.left, scene.right, sl, sr, RefView::left, sc); }));
    }
    out.naive_ms = detail::median(t_naive);
    out.memo_ms = detail::median(t_memo);
    out.eta = out.memo_ms > 0 ? out.naive_ms / out.memo_ms : 0;
    out.identical = naive_map.same_size(memo_map) && naive_map.data == memo_map.data;

    PipelineConfig pc = cfg;
    pc.threads = 1;
    pc.d_max = d_scene;
    const PipelineResult pr = run_pipeline(scene.left, scene.right, pc);
    out.stages = pr.report.stages;
    out.pipeline_total_ms = pr.report.total_ms;
    return out;
}

}  // namespace lanekit
