#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "common.hpp"
#include "image.hpp"
#include "lanes.hpp"
#include "road_profile.hpp"
#include "vanish.hpp"

namespace lanekit {

namespace detail {

inline uint64_t hash64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stateless per-coordinate uniform in [0, 1): safe to evaluate in any order.
inline Real hash_unit(uint64_t seed, uint64_t salt, int64_t x, int64_t y) {
    uint64_t h = hash64(seed ^ (salt * 0xd6e8feb86659fd93ULL));
    h = hash64(h ^ static_cast<uint64_t>(x));
    h = hash64(h ^ static_cast<uint64_t>(y));
    return static_cast<Real>(h >> 11) * 0x1.0p-53;
}

// Bilinear value noise over an integer lattice with the given cell sizes,
// smoothstep-blended, in [-1, 1].
inline Real value_noise(uint64_t seed, uint64_t salt, Real x, Real y, Real cell_x,
                        Real cell_y) {
    const Real gx = x / cell_x, gy = y / cell_y;
    const Real fx = std::floor(gx), fy = std::floor(gy);
    const int64_t x0 = static_cast<int64_t>(fx), y0 = static_cast<int64_t>(fy);
    Real tx = gx - fx, ty = gy - fy;
    tx = tx * tx * (3 - 2 * tx);
    ty = ty * ty * (3 - 2 * ty);
    auto corner = [&](int64_t cx, int64_t cy) {
        return 2 * hash_unit(seed, salt, cx, cy) - 1;
    };
    const Real top = corner(x0, y0) + tx * (corner(x0 + 1, y0) - corner(x0, y0));
    const Real bot = corner(x0, y0 + 1) + tx * (corner(x0 + 1, y0 + 1) - corner(x0, y0 + 1));
    return top + ty * (bot - top);
}

// Deterministic standard normal per pixel (Box-Muller on two hash draws).
inline Real hash_gauss(uint64_t seed, uint64_t salt, int64_t x, int64_t y) {
    const Real u1 = hash_unit(seed, salt, x, y);
    const Real u2 = hash_unit(seed, salt + 0x71ULL, x, y);
    return std::sqrt(-2 * std::log(1 - u1)) * std::cos(2 * kPi * u2);
}

}  // namespace detail

struct SceneParams {
    int width = 640;
    int height = 360;
    // Road disparity profile. Slope stays near 0.2 disparity/row: a steeper
    // road shears block content horizontally between the views faster than
    // correlation can tolerate, which is a camera-geometry limit, not a
    // matcher artefact.
    std::array<Real, 3> beta{-15.0, 0.15, 0.0001};
    std::array<Real, 5> gamma{320.0, 0, 0, 0, 0};  // true V_px per row
    int d_max = 192;                               // feasibility bound for the profile
    std::vector<Real> lane_bottoms{160.0, 320.0, 480.0};
    Real lane_width = 6.0;
    Real lane_brightness = 0.85;
    Real road_base = 0.35;
    Real sky_level = 0.75;
    Real texture_amplitude = 0.15;
    Real noise_sigma = 0.0;  // independent additive noise per view
    uint64_t rng_seed = 1;
};

struct TrueLane {
    Real bottom_col = 0;
    std::vector<std::pair<int, Real>> polyline;  // (v, centre column), v ascending
};

struct SyntheticScene {
    GrayImage left, right;
    DisparityMap true_disparity;
    std::array<Real, 3> true_beta{0, 0, 0};
    VpProfile true_vp;
    int horizon = 0;
    std::vector<TrueLane> true_lanes;
    uint64_t rng_seed = 0;
};

// Renders a rectified pair from one wide texture field: the left view is the
// field's first `width` columns and the right view samples the field shifted
// by the row's disparity, so corresponding pixels are bit-identical before
// noise. Lanes are painted into the field as bright stripes whose two borders
// are exact vanishing-point tracks; everything below the horizon carries
// value-noise texture so block matching has something to correlate.
inline SyntheticScene gen_scene(const SceneParams& p) {
    if (p.width < 16 || p.height < 16) throw Error("scene: image too small");
    if (p.d_max < 1) throw Error("scene: d_max must be positive");

    const auto hz = horizon_row(p.beta, p.height);
    if (!hz.in_range) throw Error("scene: beta has no horizon inside the image");
    const int h = hz.row;
    const int v_max = p.height - 1;
    if (road_fprime(p.beta, static_cast<Real>(h)) <= 0 ||
        road_fprime(p.beta, static_cast<Real>(v_max)) <= 0)
        throw Error("scene: beta must be increasing over the road rows");

    std::vector<int> shift(p.height, 0);
    for (int v = h; v < p.height; ++v) {
        const long long d = std::llround(road_f(p.beta, static_cast<Real>(v)));
        if (d < 0 || d > p.d_max) throw Error("scene: beta leaves [0, d_max] on road rows");
        shift[v] = static_cast<int>(d);
    }

    SyntheticScene sc;
    sc.true_beta = p.beta;
    sc.horizon = h;
    sc.rng_seed = p.rng_seed;
    sc.true_vp.v_top = h;
    sc.true_vp.v_max = v_max;
    sc.true_vp.vpy = vpy_profile(p.beta, p.height).value;
    sc.true_vp.vpx.resize(p.height);
    for (int v = 0; v < p.height; ++v) {
        const Real t = static_cast<Real>(v);
        sc.true_vp.vpx[v] =
            p.gamma[0] + t * (p.gamma[1] + t * (p.gamma[2] + t * (p.gamma[3] + t * p.gamma[4])));
    }

    // Wide texture field: left view plus the largest row shift.
    const int wide = p.width + shift[v_max];
    GrayImage field(wide, p.height, 0);
    for (int v = 0; v < p.height; ++v)
        for (int u = 0; u < wide; ++u) {
            if (v < h) {
                field.at(u, v) = p.sky_level;
                continue;
            }
            // Anisotropic wear streaks: fine across the road, elongated along
            // it. The perspective road shears vertically between the views
            // (disparity grows with v), so horizontally fine, vertically slow
            // texture keeps block correlation sharp in u yet shear-tolerant,
            // like tyre-polished asphalt. A whisper of grain keeps flat cells
            // above the deviation floor.
            const Real n = 0.55 * detail::value_noise(p.rng_seed, 11, u, v, 2.0, 16.0) +
                           0.35 * detail::value_noise(p.rng_seed, 13, u, v, 5.0, 40.0) +
                           0.1 * (2 * detail::hash_unit(p.rng_seed, 17, u, v) - 1);
            field.at(u, v) = p.road_base + p.texture_amplitude * n;
        }

    // Lane stripes. Border tracks converge toward the vanishing point, so the
    // stripe thins with distance and its edges aim exactly at true_vp.
    for (const Real bottom : p.lane_bottoms) {
        const auto left_border = lane_track(bottom - p.lane_width / 2, sc.true_vp);
        const auto right_border = lane_track(bottom + p.lane_width / 2, sc.true_vp);
        const auto centre = lane_track(bottom, sc.true_vp);
        TrueLane lane;
        lane.bottom_col = bottom;
        for (int v = v_max; v >= h; --v) {
            const int i = v - h;
            const Real lb = left_border[i], rb = right_border[i];
            if (std::isnan(lb) || std::isnan(rb) || rb - lb < 0.5) break;
            lane.polyline.emplace_back(v, centre[i]);
            const int u0 = std::max(0, static_cast<int>(std::floor(lb - 1)));
            const int u1 = std::min(wide - 1, static_cast<int>(std::ceil(rb + 1)));
            for (int u = u0; u <= u1; ++u) {
                const Real cov = std::clamp(
                    std::min(rb, u + 0.5) - std::max(lb, u - 0.5), 0.0, 1.0);
                if (cov <= 0) continue;
                Real& px = field.at(u, v);
                px = px + cov * (p.lane_brightness - px);
            }
        }
        std::reverse(lane.polyline.begin(), lane.polyline.end());
        sc.true_lanes.push_back(std::move(lane));
    }

    sc.left = GrayImage(p.width, p.height, 0);
    sc.right = GrayImage(p.width, p.height, 0);
    sc.true_disparity = DisparityMap(p.width, p.height, 0);
    for (int v = 0; v < p.height; ++v)
        for (int u = 0; u < p.width; ++u) {
            Real l = field.at(u, v);
            Real r = field.at(u + shift[v], v);
            if (p.noise_sigma > 0) {
                l += p.noise_sigma * detail::hash_gauss(p.rng_seed, 21, u, v);
                r += p.noise_sigma * detail::hash_gauss(p.rng_seed, 23, u, v);
            }
            sc.left.at(u, v) = std::clamp(l, 0.0, 1.0);
            sc.right.at(u, v) = std::clamp(r, 0.0, 1.0);
            sc.true_disparity.at(u, v) = shift[v];
        }
    return sc;
}

}  // namespace lanekit
