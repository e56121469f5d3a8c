#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lanekit/common.hpp"
#include "lanekit/config.hpp"
#include "lanekit/dp.hpp"
#include "lanekit/image.hpp"
#include "lanekit/lanes.hpp"
#include "lanekit/preprocess.hpp"
#include "lanekit/ransac.hpp"
#include "lanekit/road_profile.hpp"
#include "lanekit/stereo.hpp"
#include "lanekit/vanish.hpp"

namespace lanekit {

struct StageTiming {
    int stage = 0;
    std::string name;
    double ms = 0.0;
};

struct PipelineReport {
    int width = 0;
    int height = 0;
    int threads = 1;
    std::uint64_t rng_seed = 0;

    std::vector<StageTiming> stages;
    double total_ms = 0.0;

    long valid_disparities = 0;   // after the consistency check
    bool vpath_has_evidence = false;

    std::array<Real, 3> beta{0, 0, 0};
    int beta_iterations = 0;
    Real beta_inlier_fraction = 0;
    bool beta_degraded = false;

    int horizon = 0;
    bool horizon_in_range = false;

    long road_mask_pixels = 0;
    long edge_pixels = 0;

    long vpx_votes = 0;
    long vpx_skipped = 0;
    bool upath_has_evidence = false;

    std::array<Real, 5> gamma{0, 0, 0, 0, 0};
    Real gamma_kappa = 1;
    Real gamma_v_normalizer = 0;
    int gamma_iterations = 0;
    Real gamma_inlier_fraction = 0;
    bool gamma_degraded = false;

    Real tr_lpv_used = 0;
    int lane_count = 0;
};

// Every intermediate is kept so callers can dump any stage to disk.
struct PipelineResult {
    PipelineConfig config;

    BlockStats stats_left;
    DisparityMap disp_left;
    DisparityMap disp_right;
    DisparityMap disparity;       // consistency-checked

    VDisparityHist vdisparity;
    DpPath vpath;
    BetaResult beta;
    RoadProfile road;

    Mask mask;
    GrayImage smoothed;
    GradientField gradients;
    EdgeSet edges;

    SparseVpxMap sparse_vpx;
    DenseVpxAccumulator vpx_acc;
    DpPath upath;
    GammaResult gamma;
    VpProfile vp;

    GrayImage m0;
    GrayImage m1;
    EnergyHistogram energy;
    LaneSet lanes;

    PipelineReport report;
};

namespace stage_names {
inline constexpr const char* kNames[12] = {
    "block statistics",
    "left disparity",
    "right disparity",
    "consistency check",
    "v-disparity accumulation",
    "road path extraction",
    "road profile fit",
    "road mask",
    "bilateral smoothing",
    "edge detection",
    "vanishing point estimation",
    "lane detection",
};
}

inline PipelineResult run_pipeline(const GrayImage& left, const GrayImage& right,
                                   const PipelineConfig& cfg) {
    validate_config(cfg);
    if (left.empty() || right.empty())
        throw StageError(1, stage_names::kNames[0], "empty input image");
    if (!left.same_size(right))
        throw StageError(1, stage_names::kNames[0], "stereo pair dimensions differ");
    if (left.width <= 2 * cfg.rho || left.height <= 2 * cfg.rho)
        throw StageError(1, stage_names::kNames[0], "image smaller than the matching block");

    using clock = std::chrono::steady_clock;
    const auto t_begin = clock::now();

    PipelineResult r;
    r.config = cfg;
    r.report.width = left.width;
    r.report.height = left.height;
    r.report.threads = cfg.threads;
    r.report.rng_seed = cfg.rng_seed;

    auto run_stage = [&](int n, auto&& body) {
        const char* name = stage_names::kNames[n - 1];
        const auto t0 = clock::now();
        try {
            body();
        } catch (const StageError&) {
            throw;
        } catch (const Error& e) {
            throw StageError(n, name, e.what());
        }
        const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        r.report.stages.push_back({n, name, ms});
    };

    StereoConfig sc;
    sc.rho = cfg.rho;
    sc.d_min = 0;
    sc.d_max = cfg.d_max;
    sc.tau = cfg.tau;
    sc.tr_lrc = cfg.tr_lrc;
    sc.sigma_floor = cfg.sigma_floor;
    sc.threads = cfg.threads;

    BlockStats stats_right;
    run_stage(1, [&] {
        r.stats_left = precompute_stats(left, cfg.rho);
        stats_right = precompute_stats(right, cfg.rho);
    });

    run_stage(2, [&] {
        r.disp_left = match_srp(left, right, r.stats_left, stats_right, RefView::left, sc);
    });

    run_stage(3, [&] {
        r.disp_right = match_srp(right, left, stats_right, r.stats_left, RefView::right, sc);
    });

    run_stage(4, [&] {
        r.disparity = lrc_check(r.disp_left, r.disp_right, cfg.tr_lrc);
        long n = 0;
        for (int v = 0; v < r.disparity.height; ++v)
            for (int u = 0; u < r.disparity.width; ++u)
                if (r.disparity.at(u, v) != 0) ++n;
        r.report.valid_disparities = n;
    });

    run_stage(5, [&] { r.vdisparity = build_vdisparity(r.disparity, cfg.d_max); });

    run_stage(6, [&] {
        r.vpath = dp_extract_vpath(r.vdisparity, cfg.lambda_y, cfg.paper_sign);
        r.report.vpath_has_evidence = r.vpath.has_evidence;
        if (!r.vpath.has_evidence)
            throw Error("v-disparity histogram is empty; no road surface evidence");
    });

    run_stage(7, [&] {
        RansacConfig rc;
        rc.tolerance = cfg.tr_y;
        rc.inlier_fraction = cfg.eps_y;
        rc.sample_size = 3;
        rc.max_iterations = 200;
        rc.rng_seed = cfg.rng_seed;
        r.beta = ransac_beta(r.vpath, rc);
        r.road = make_road_profile(r.beta.beta, left.height);
        r.report.beta = r.beta.beta;
        r.report.beta_iterations = r.beta.iterations;
        r.report.beta_inlier_fraction = r.beta.inlier_fraction;
        r.report.beta_degraded = r.beta.degraded;
        r.report.horizon = r.road.horizon;
        r.report.horizon_in_range = r.road.horizon_in_range;
    });

    run_stage(8, [&] {
        r.mask = road_mask(r.disparity, r.road, cfg.varpi);
        long n = 0;
        for (int v = 0; v < r.mask.height; ++v)
            for (int u = 0; u < r.mask.width; ++u)
                if (r.mask.at(u, v)) ++n;
        r.report.road_mask_pixels = n;
    });

    run_stage(9, [&] {
        const int radius = (cfg.bf_window - 1) / 2;
        r.smoothed = bilateral_filter(left, cfg.sigma_s, cfg.sigma_r, radius, cfg.threads);
    });

    run_stage(10, [&] {
        r.gradients = sobel_gradients(r.smoothed);
        r.edges = edge_map(r.gradients, cfg.sobel_threshold / Real(255), r.mask);
        r.report.edge_pixels = static_cast<long>(r.edges.pixels.size());
    });

    run_stage(11, [&] {
        r.sparse_vpx = sparse_vpx(r.edges, r.road.vpy, kGradientFloor, cfg.xi, left.width);
        r.report.vpx_votes = static_cast<long>(r.sparse_vpx.votes.size());
        r.report.vpx_skipped = r.sparse_vpx.skipped;
        r.vpx_acc = accumulate_dense_vpx(r.sparse_vpx, r.road.horizon, left.height - 1,
                                         cfg.chi, cfg.rho_vote);
        r.upath = dp_extract_upath(r.vpx_acc, cfg.lambda_x, cfg.paper_sign);
        r.report.upath_has_evidence = r.upath.has_evidence;
        if (!r.upath.has_evidence)
            throw Error("vanishing-point accumulator is empty; no lane edge evidence");
        RansacConfig rc;
        rc.tolerance = cfg.tr_x;
        rc.inlier_fraction = cfg.eps_x;
        rc.sample_size = 5;
        rc.max_iterations = 200;
        rc.rng_seed = cfg.rng_seed;
        r.gamma = ransac_gamma(r.upath, rc, Real(1));
        r.report.gamma = r.gamma.profile.gamma;
        r.report.gamma_kappa = r.gamma.profile.kappa;
        r.report.gamma_v_normalizer = r.gamma.profile.v_normalizer;
        r.report.gamma_iterations = r.gamma.iterations;
        r.report.gamma_inlier_fraction = r.gamma.inlier_fraction;
        r.report.gamma_degraded = r.gamma.degraded;

        r.vp.v_top = r.road.horizon;
        r.vp.v_max = left.height - 1;
        r.vp.vpx = vpx_profile(r.gamma.profile, left.height);
        r.vp.vpy = r.road.vpy.value;
    });

    run_stage(12, [&] {
        r.m0 = build_m0(r.gradients, r.edges, r.vp, cfg.nu, cfg.varsigma, cfg.sigma_g);
        r.m1 = build_m1(r.m0);
        const Real tr = std::isnan(cfg.tr_lpv)
                            ? auto_lane_threshold(r.m1, r.vp.v_top, r.vp.v_max)
                            : cfg.tr_lpv;
        r.report.tr_lpv_used = tr;
        r.energy = aggregate_energy(r.m1, r.vp, cfg.xi, cfg.lambda_g, cfg.threads);
        r.lanes = select_lanes(r.energy, tr, cfg.min_lane_sep, r.vp);
        r.report.lane_count = static_cast<int>(r.lanes.lanes.size());
    });

    double sum = 0;
    for (const auto& s : r.report.stages) sum += s.ms;
    const double total = std::chrono::duration<double, std::milli>(clock::now() - t_begin).count();
    r.report.total_ms = std::max(total, sum);
    return r;
}

}  // namespace lanekit
