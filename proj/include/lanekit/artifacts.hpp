#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "lanekit/image_io.hpp"
#include "lanekit/pipeline.hpp"

namespace lanekit {

namespace detail {

inline std::string join_path(const std::string& dir, const char* file) {
    return (std::filesystem::path(dir) / file).string();
}

// Affine rescale to [0,1] for eyeballing signed or unnormalized maps.
inline GrayImage normalize_map(const GrayImage& m) {
    Real lo = 0, hi = 0;
    bool first = true;
    for (Real x : m.data) {
        if (first) { lo = hi = x; first = false; }
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    GrayImage out(m.width, m.height, 0);
    const Real span = hi - lo;
    if (span <= 0) return out;
    for (size_t i = 0; i < m.data.size(); ++i) out.data[i] = (m.data[i] - lo) / span;
    return out;
}

inline void write_disparity_pgm(const std::string& path, const DisparityMap& d) {
    Image<uint16_t> img(d.width, d.height, 0);
    for (size_t i = 0; i < d.data.size(); ++i) {
        const long v = static_cast<long>(d.data[i]) * 256;
        img.data[i] = static_cast<uint16_t>(std::clamp(v, 0L, 65535L));
    }
    write_pgm16(path, img);
}

inline void write_path_csv(const std::string& path, const DpPath& p,
                           const char* a, const char* b) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path);
    out << a << "," << b << "\n";
    for (const auto& [x, y] : p.points) out << x << "," << y << "\n";
}

}  // namespace detail

inline nlohmann::json report_to_json(const PipelineResult& r) {
    const PipelineReport& rep = r.report;
    nlohmann::json j;
    j["width"] = rep.width;
    j["height"] = rep.height;
    j["threads"] = rep.threads;
    j["rng_seed"] = rep.rng_seed;
    j["total_ms"] = rep.total_ms;
    j["stages"] = nlohmann::json::array();
    for (const auto& s : rep.stages)
        j["stages"].push_back({{"stage", s.stage}, {"name", s.name}, {"ms", s.ms}});

    j["stereo"] = {{"valid_disparities", rep.valid_disparities}};
    j["road"] = {
        {"vpath_has_evidence", rep.vpath_has_evidence},
        {"beta", {rep.beta[0], rep.beta[1], rep.beta[2]}},
        {"ransac_iterations", rep.beta_iterations},
        {"inlier_fraction", rep.beta_inlier_fraction},
        {"degraded", rep.beta_degraded},
        {"horizon", rep.horizon},
        {"horizon_in_range", rep.horizon_in_range},
        {"mask_pixels", rep.road_mask_pixels},
    };
    j["edges"] = {{"count", rep.edge_pixels}};
    j["vanishing_point"] = {
        {"votes", rep.vpx_votes},
        {"skipped", rep.vpx_skipped},
        {"upath_has_evidence", rep.upath_has_evidence},
        {"gamma", {rep.gamma[0], rep.gamma[1], rep.gamma[2], rep.gamma[3], rep.gamma[4]}},
        {"kappa", rep.gamma_kappa},
        {"v_normalizer", rep.gamma_v_normalizer},
        {"ransac_iterations", rep.gamma_iterations},
        {"inlier_fraction", rep.gamma_inlier_fraction},
        {"degraded", rep.gamma_degraded},
    };
    j["lanes"] = {{"threshold", rep.tr_lpv_used}, {"count", rep.lane_count}};
    j["lanes"]["detected"] = nlohmann::json::array();
    for (size_t i = 0; i < r.lanes.lanes.size(); ++i) {
        const Lane& ln = r.lanes.lanes[i];
        nlohmann::json jl;
        jl["lane_id"] = i;
        jl["bottom_col"] = ln.bottom_col;
        jl["energy"] = ln.energy;
        jl["polyline"] = nlohmann::json::array();
        for (const auto& [v, u] : ln.polyline) jl["polyline"].push_back({v, u});
        j["lanes"]["detected"].push_back(std::move(jl));
    }
    return j;
}

inline void write_lanes_csv(const std::string& path, const LaneSet& lanes) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path);
    out << "lane_id,v,u\n";
    char buf[64];
    for (size_t i = 0; i < lanes.lanes.size(); ++i)
        for (const auto& [v, u] : lanes.lanes[i].polyline) {
            std::snprintf(buf, sizeof buf, "%zu,%d,%.3f\n", i, v, u);
            out << buf;
        }
}

inline RgbImage render_overlay(const GrayImage& left, const LaneSet& lanes) {
    RgbImage img(left.width, left.height, Rgb{0, 0, 0});
    for (size_t i = 0; i < left.data.size(); ++i) {
        const auto g = static_cast<uint8_t>(
            std::clamp(std::lround(left.data[i] * 255), 0L, 255L));
        img.data[i] = {g, g, g};
    }
    for (const Lane& ln : lanes.lanes)
        for (const auto& [v, u] : ln.polyline) {
            const int uc = static_cast<int>(std::lround(u));
            for (int du = -1; du <= 1; ++du) {
                const int x = uc + du;
                if (img.inside(x, v)) img.at(x, v) = {220, 30, 30};
            }
        }
    return img;
}

// Default artifact set; emit_all adds one file per remaining stage.
inline void emit_artifacts(const PipelineResult& r, const GrayImage& left,
                           const std::string& out_dir, bool emit_all) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto p = [&](const char* f) { return detail::join_path(out_dir, f); };

    detail::write_disparity_pgm(p("disparity.pgm"), r.disparity);

    {
        const VDisparityHist& h = r.vdisparity;
        Image<uint8_t> img(h.d_max + 1, h.rows, 0);
        for (int v = 0; v < h.rows; ++v)
            for (int d = 0; d <= h.d_max; ++d)
                img.at(d, v) = static_cast<uint8_t>(std::min<int32_t>(h.at(d, v), 255));
        write_pgm8(p("vdisparity.pgm"), img);
    }

    {
        const DenseVpxAccumulator& a = r.vpx_acc;
        const int rows = a.v_max - a.v_top + 1;
        Image<uint8_t> img(a.ext_cols, rows, 0);
        for (int v = 0; v < rows; ++v)
            for (int c = 0; c < a.ext_cols; ++c) {
                const long x = std::lround(-a.at(a.ext_lo + c, a.v_top + v));
                img.at(c, v) = static_cast<uint8_t>(std::clamp(x, 0L, 255L));
            }
        write_pgm8(p("vpx_accumulator.pgm"), img);
    }

    {
        GrayImage e(left.width, left.height, 0);
        for (const EdgePixel& px : r.edges.pixels) e.at(px.u, px.v) = 1;
        write_png_gray(p("edges.png"), e);
    }

    write_lanes_csv(p("lanes.csv"), r.lanes);
    write_png_rgb(p("overlay.png"), render_overlay(left, r.lanes));

    {
        std::ofstream out(p("report.json"));
        if (!out) throw Error("cannot open report.json");
        out << report_to_json(r).dump(2) << "\n";
    }

    if (!emit_all) return;

    write_png_gray(p("block_sigma.png"), detail::normalize_map(r.stats_left.sigma));
    detail::write_disparity_pgm(p("disparity_left.pgm"), r.disp_left);
    detail::write_disparity_pgm(p("disparity_right.pgm"), r.disp_right);
    detail::write_path_csv(p("vpath.csv"), r.vpath, "d", "v");

    {
        std::ofstream out(p("road_fit.csv"));
        if (!out) throw Error("cannot open road_fit.csv");
        out << "v,f,vpy,vpx\n";
        char buf[128];
        for (int v = 0; v < r.road.rows; ++v) {
            const Real f = r.road.f(static_cast<Real>(v));
            const Real vpy = r.road.vpy.singular[v] ? std::nan("") : r.road.vpy.value[v];
            const Real vpx = r.vp.defined(v) ? r.vp.vpx[v] : std::nan("");
            std::snprintf(buf, sizeof buf, "%d,%.4f,%.4f,%.4f\n", v, f, vpy, vpx);
            out << buf;
        }
    }

    {
        GrayImage m(r.mask.width, r.mask.height, 0);
        for (size_t i = 0; i < m.data.size(); ++i) m.data[i] = r.mask.data[i] ? 1 : 0;
        write_png_gray(p("road_mask.png"), m);
    }

    write_png_gray(p("smoothed.png"), r.smoothed);
    write_png_gray(p("gradient_magnitude.png"), detail::normalize_map(r.gradients.magnitude));
    detail::write_path_csv(p("upath.csv"), r.upath, "col", "v");
    write_png_gray(p("m0.png"), detail::normalize_map(r.m0));
    write_png_gray(p("m1.png"), detail::normalize_map(r.m1));

    {
        std::ofstream out(p("energy_histogram.csv"));
        if (!out) throw Error("cannot open energy_histogram.csv");
        out << "col,energy\n";
        char buf[64];
        for (size_t i = 0; i < r.energy.h.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%d,%.6f\n",
                          r.energy.ext_lo + static_cast<int>(i), r.energy.h[i]);
            out << buf;
        }
    }
}

}  // namespace lanekit
