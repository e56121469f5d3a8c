#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "common.hpp"
#include "dp.hpp"
#include "image.hpp"
#include "ransac.hpp"

namespace lanekit {

// ---------------------------------------------------------------- histogram

// Row-wise disparity histogram. Bin (d, v) counts pixels of image row v with
// disparity d. Bin 0 stays empty: zero marks invalid pixels, and a zero
// disparity carries no road evidence anyway.
struct VDisparityHist {
    int d_max = 0;
    int rows = 0;
    std::vector<int32_t> count;  // count[v * (d_max + 1) + d]

    int32_t at(int d, int v) const { return count[static_cast<size_t>(v) * (d_max + 1) + d]; }
    int32_t& cell(int d, int v) { return count[static_cast<size_t>(v) * (d_max + 1) + d]; }
};

inline VDisparityHist build_vdisparity(const DisparityMap& disp, int d_max) {
    if (disp.empty()) throw Error("v-disparity: empty disparity map");
    if (d_max < 1) throw Error("v-disparity: d_max must be positive");
    VDisparityHist h;
    h.d_max = d_max;
    h.rows = disp.height;
    h.count.assign(static_cast<size_t>(disp.height) * (d_max + 1), 0);
    for (int v = 0; v < disp.height; ++v)
        for (int u = 0; u < disp.width; ++u) {
            const int d = disp.at(u, v);
            if (d >= 1 && d <= d_max) ++h.cell(d, v);
        }
    return h;
}

// ---------------------------------------------------------------- DP path

// Minimum-energy row-per-disparity path: points are (d, v) with d descending
// from d_max to 0. The row index may only shrink as the disparity shrinks —
// the road recedes upward in the image — by at most six rows per step.
// Default penalty charges lambda_y per skipped row; paper_sign flips it to a
// reward for benchmarking the published sign convention.
inline DpPath dp_extract_vpath(const VDisparityHist& h, Real lambda_y, bool paper_sign = false) {
    if (h.rows < 1 || h.d_max < 1) throw Error("v-path: histogram is empty");
    const int stages = h.d_max + 1;
    static const std::vector<int> offsets = {0, 1, 2, 3, 4, 5, 6};

    auto data = [&](int stage, int v) -> Real {
        return -static_cast<Real>(h.at(h.d_max - stage, v));
    };
    auto penalty = [&](int off) -> Real {
        return paper_sign ? -lambda_y * off : lambda_y * off;
    };

    DpPath out;
    auto [path, energy] = detail::dp_min_path(stages, h.rows, data, offsets, penalty, &out.steps);
    out.energy = energy;
    out.points.reserve(stages);
    for (int i = 0; i < stages; ++i) out.points.emplace_back(h.d_max - i, path[i]);
    out.has_evidence = false;
    for (const int32_t c : h.count)
        if (c > 0) {
            out.has_evidence = true;
            break;
        }
    return out;
}

// ---------------------------------------------------------------- model fit

// Least-squares parabola d = b0 + b1*v + b2*v^2 through (d, v) samples via
// the 3x3 normal equations. Rows are scaled to [0, 1] before forming the
// system so large row indices do not wreck the conditioning; coefficients
// are mapped back afterwards.
inline std::array<Real, 3> fit_parabola_lsq(const std::vector<std::pair<int, int>>& pts) {
    int distinct = 0;
    {
        std::vector<int> rows;
        rows.reserve(pts.size());
        for (const auto& p : pts) rows.push_back(p.second);
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
        distinct = static_cast<int>(rows.size());
    }
    if (distinct < 3) throw Error("parabola fit: needs three distinct rows");

    Real s = 1;
    for (const auto& p : pts) s = std::max(s, std::abs(static_cast<Real>(p.second)));

    Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    for (const auto& p : pts) {
        const Real t = static_cast<Real>(p.second) / s;
        const Eigen::Vector3d phi(1.0, t, t * t);
        a += phi * phi.transpose();
        b += static_cast<Real>(p.first) * phi;
    }
    const Eigen::Vector3d x = a.ldlt().solve(b);
    return {x[0], x[1] / s, x[2] / (s * s)};
}

struct BetaResult {
    std::array<Real, 3> beta{0, 0, 0};
    std::vector<std::pair<int, int>> inliers;
    int iterations = 0;
    Real inlier_fraction = 0;
    bool degraded = false;
};

inline BetaResult ransac_beta(const std::vector<std::pair<int, int>>& points,
                              const RansacConfig& cfg) {
    auto fit = [](const std::vector<std::pair<int, int>>& s) { return fit_parabola_lsq(s); };
    auto res2 = [](const std::array<Real, 3>& m, const std::pair<int, int>& p) {
        const Real v = static_cast<Real>(p.second);
        const Real r = static_cast<Real>(p.first) - (m[0] + m[1] * v + m[2] * v * v);
        return r * r;
    };
    auto o = detail::ransac_trim<std::array<Real, 3>>(points, cfg, fit, res2);
    BetaResult out;
    out.beta = o.model;
    out.inliers = std::move(o.inliers);
    out.iterations = o.iterations;
    out.inlier_fraction = o.inlier_fraction;
    out.degraded = o.degraded;
    return out;
}

inline BetaResult ransac_beta(const DpPath& path, const RansacConfig& cfg) {
    return ransac_beta(path.points, cfg);
}

// ---------------------------------------------------------------- profiles

inline Real road_f(const std::array<Real, 3>& beta, Real v) {
    return beta[0] + beta[1] * v + beta[2] * v * v;
}

inline Real road_fprime(const std::array<Real, 3>& beta, Real v) {
    return beta[1] + 2 * beta[2] * v;
}

struct HorizonResult {
    int row = 0;
    bool in_range = true;  // false: no upward zero crossing inside the image
};

// Row where the road profile crosses zero going upward (f' > 0 at the root),
// rounded and clamped. When no such crossing lands inside [0, rows-1] the
// result clamps to row 0 with the flag cleared.
inline HorizonResult horizon_row(const std::array<Real, 3>& beta, int rows) {
    if (rows < 1) throw Error("horizon: row count must be positive");
    Real root;
    if (beta[2] == 0) {
        if (beta[1] <= 0) return {0, false};
        root = -beta[0] / beta[1];
    } else {
        const Real disc = beta[1] * beta[1] - 4 * beta[2] * beta[0];
        if (disc <= 0) return {0, false};  // tangent roots never cross upward
        // f'(root) = +sqrt(disc) at this root, for either sign of beta[2]
        root = (-beta[1] + std::sqrt(disc)) / (2 * beta[2]);
    }
    const long long r = std::llround(root);
    if (r < 0 || r >= rows) return {0, false};
    return {static_cast<int>(r), true};
}

struct VpyProfile {
    std::vector<Real> value;        // per image row
    std::vector<uint8_t> singular;  // rows where f'(v) vanished
};

// Row coordinate of the vanishing point seen from row v: v - f(v)/f'(v).
inline VpyProfile vpy_profile(const std::array<Real, 3>& beta, int rows) {
    if (rows < 1) throw Error("vpy: row count must be positive");
    VpyProfile out;
    out.value.assign(rows, 0);
    out.singular.assign(rows, 0);
    for (int v = 0; v < rows; ++v) {
        const Real fp = road_fprime(beta, static_cast<Real>(v));
        if (std::abs(fp) < 1e-12) {
            out.singular[v] = 1;
            out.value[v] = static_cast<Real>(v);
            continue;
        }
        out.value[v] = static_cast<Real>(v) - road_f(beta, static_cast<Real>(v)) / fp;
    }
    return out;
}

struct RoadProfile {
    std::array<Real, 3> beta{0, 0, 0};
    int horizon = 0;
    bool horizon_in_range = true;
    int rows = 0;
    VpyProfile vpy;

    Real f(Real v) const { return road_f(beta, v); }
    Real fprime(Real v) const { return road_fprime(beta, v); }
};

// Composed profile for the pipeline. A singular V_py derivative anywhere in
// the valid row interval makes every downstream vanishing-point expression
// meaningless, so that aborts; a horizon outside the image merely flags.
inline RoadProfile make_road_profile(const std::array<Real, 3>& beta, int rows) {
    const auto h = horizon_row(beta, rows);
    RoadProfile out;
    out.beta = beta;
    out.horizon = h.row;
    out.horizon_in_range = h.in_range;
    out.rows = rows;
    out.vpy = vpy_profile(beta, rows);
    for (int v = out.horizon; v < rows; ++v)
        if (out.vpy.singular[v])
            throw Error("road profile: singular V_py derivative at row " + std::to_string(v));
    return out;
}

}  // namespace lanekit
