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
#include "preprocess.hpp"
#include "ransac.hpp"
#include "road_profile.hpp"

namespace lanekit {

// Gradient floor for the tangent ratio gy/gx, in normalized intensity units.
inline constexpr Real kGradientFloor = 1e-3;

// Column estimates live on an extended axis so a vanishing point outside the
// frame stays representable: columns span [-xi*W, (1+xi)*W - 1].
inline int extended_col_lo(Real xi, int width) {
    return -static_cast<int>(std::llround(xi * width));
}

inline int extended_col_count(Real xi, int width) {
    return static_cast<int>(std::llround((2 * xi + 1) * width));
}

// ------------------------------------------------------------- sparse votes

struct SparseVpxMap {
    struct Vote {
        int u_e = 0, v_e = 0;  // edge pixel
        int col = 0;           // voted extended column
    };
    std::vector<Vote> votes;
    long skipped = 0;  // edges with a near-vertical gradient or undefined row
    int ext_lo = 0;
    int ext_cols = 0;
};

// Per-edge vanishing-column estimate: follow the edge tangent from (u_e, v_e)
// up to the row's vanishing-point ordinate. The tangent is perpendicular to
// the gradient, giving du/dv = -gy/gx and col = u_e + (v_e - vpy)*(gy/gx);
// edges with |gx| below eps_g would blow the ratio up and are skipped.
inline SparseVpxMap sparse_vpx(const EdgeSet& edges, const VpyProfile& vpy, Real eps_g,
                               Real xi, int width) {
    if (width < 1) throw Error("sparse vpx: width must be positive");
    SparseVpxMap out;
    out.ext_lo = extended_col_lo(xi, width);
    out.ext_cols = extended_col_count(xi, width);
    const int ext_hi = out.ext_lo + out.ext_cols - 1;
    const int rows = static_cast<int>(vpy.value.size());
    out.votes.reserve(edges.pixels.size());
    for (const auto& e : edges.pixels) {
        if (e.v < 0 || e.v >= rows || vpy.singular[e.v] || std::abs(e.gx) < eps_g) {
            ++out.skipped;
            continue;
        }
        const Real col = e.u + (e.v - vpy.value[e.v]) * (e.gy / e.gx);
        const long long c = std::llround(col);
        const int cc = static_cast<int>(
            std::clamp(c, static_cast<long long>(out.ext_lo), static_cast<long long>(ext_hi)));
        out.votes.push_back({e.u, e.v, cc});
    }
    return out;
}

// --------------------------------------------------------- dense accumulator

struct DenseVpxAccumulator {
    int ext_lo = 0;
    int ext_cols = 0;
    int v_top = 0;  // horizon row
    int v_max = 0;  // bottom row
    int chi = 0;
    Real rho_vote = 1;
    std::vector<Real> m;  // (v_max - v_top + 1) x ext_cols, from v_top down

    Real at(int ext_u, int v) const {
        return m[static_cast<size_t>(v - v_top) * ext_cols + (ext_u - ext_lo)];
    }
    Real& cell(int ext_u, int v) {
        return m[static_cast<size_t>(v - v_top) * ext_cols + (ext_u - ext_lo)];
    }
};

namespace detail {

// Vote-gathering band for row v. Near the bottom the band grows downward to
// the last row; in the middle it is centred with radius chi; near the top it
// thins against the horizon. Checked in that order, so short row ranges fall
// into the growing regime first.
struct VoteBand {
    int top = 0, bottom = 0;
};

inline VoteBand vote_band(int v, int v_top, int v_max, int chi) {
    if (v > v_max - chi - 1) return {v, v_max};
    if (v >= v_top + chi) return {v - chi, v + chi};
    return {v_top, v + chi};
}

}  // namespace detail

// Banded column histogram of the sparse votes, negated so that stronger
// support means lower energy. Both band endpoints move monotonically upward
// as v decreases, so each row is produced by sliding: fold in the rows that
// enter at the top, fold out the rows that leave at the bottom.
inline DenseVpxAccumulator accumulate_dense_vpx(const SparseVpxMap& sparse, int v_top,
                                                int v_max, int chi, Real rho_vote) {
    if (v_top > v_max) throw Error("dense vpx: empty row range");
    if (chi < 0) throw Error("dense vpx: negative band radius");
    DenseVpxAccumulator acc;
    acc.ext_lo = sparse.ext_lo;
    acc.ext_cols = sparse.ext_cols;
    acc.v_top = v_top;
    acc.v_max = v_max;
    acc.chi = chi;
    acc.rho_vote = rho_vote;
    const int nrows = v_max - v_top + 1;
    acc.m.assign(static_cast<size_t>(nrows) * sparse.ext_cols, 0);

    std::vector<std::vector<int>> by_row(nrows);
    for (const auto& vote : sparse.votes) {
        if (vote.v_e < v_top || vote.v_e > v_max) continue;
        by_row[vote.v_e - v_top].push_back(vote.col - sparse.ext_lo);
    }

    std::vector<int32_t> cnt(sparse.ext_cols, 0);
    int top_cur = v_max + 1, bot_cur = v_max;  // empty window
    for (int v = v_max; v >= v_top; --v) {
        const auto band = detail::vote_band(v, v_top, v_max, chi);
        for (int r = band.top; r < top_cur; ++r)
            for (int c : by_row[r - v_top]) ++cnt[c];
        top_cur = band.top;
        for (int r = band.bottom + 1; r <= bot_cur; ++r)
            for (int c : by_row[r - v_top]) --cnt[c];
        bot_cur = band.bottom;

        Real* row = &acc.m[static_cast<size_t>(v - v_top) * sparse.ext_cols];
        for (int c = 0; c < sparse.ext_cols; ++c) row[c] = -rho_vote * cnt[c];
    }
    return acc;
}

// ----------------------------------------------------------------- DP path

// Minimum-energy column-per-row path through the accumulator: points are
// (extended column, v) with v descending from the bottom row. The column may
// drift by up to five per row; drift costs lambda_x per column by default,
// paper_sign charges the signed drift instead.
inline DpPath dp_extract_upath(const DenseVpxAccumulator& acc, Real lambda_x,
                               bool paper_sign = false) {
    const int stages = acc.v_max - acc.v_top + 1;
    static const std::vector<int> offsets = {0, -1, 1, -2, 2, -3, 3, -4, 4, -5, 5};

    auto data = [&](int stage, int s) -> Real {
        return acc.m[static_cast<size_t>(acc.v_max - acc.v_top - stage) * acc.ext_cols + s];
    };
    auto penalty = [&](int off) -> Real {
        return paper_sign ? lambda_x * off : lambda_x * std::abs(off);
    };

    DpPath out;
    auto [path, energy] =
        detail::dp_min_path(stages, acc.ext_cols, data, offsets, penalty, &out.steps);
    out.energy = energy;
    out.points.reserve(stages);
    for (int i = 0; i < stages; ++i)
        out.points.emplace_back(acc.ext_lo + path[i], acc.v_max - i);
    out.has_evidence = false;
    for (const Real x : acc.m)
        if (x != 0) {
            out.has_evidence = true;
            break;
        }
    return out;
}

// ---------------------------------------------------------------- model fit

struct QuarticProfile {
    std::array<Real, 5> gamma{0, 0, 0, 0, 0};  // coefficients over the raw row index
    Real kappa = 1;
    Real v_normalizer = 1;

    Real eval(Real v) const {
        return gamma[0] + v * (gamma[1] + v * (gamma[2] + v * (gamma[3] + v * gamma[4])));
    }
};

// Least-squares quartic u = g(v) through (u, v) samples via the 5x5 normal
// equations, both sides scaled by kappa. Rows are mapped to t = v/s with
// s = max|v| before forming the system; raw fourth powers of row indices
// would otherwise dwarf the low-order columns and wreck the solve. One
// refinement step keeps the solution insensitive to the kappa scaling.
inline QuarticProfile fit_quartic(const std::vector<std::pair<int, int>>& pts, Real kappa = 1,
                                  Real v_normalizer = 0) {
    {
        std::vector<int> rows;
        rows.reserve(pts.size());
        for (const auto& p : pts) rows.push_back(p.second);
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
        if (rows.size() < 5) throw Error("quartic fit: needs five distinct rows");
    }
    if (kappa <= 0) throw Error("quartic fit: kappa must be positive");

    Real s = v_normalizer;
    if (s <= 0) {
        s = 1;
        for (const auto& p : pts) s = std::max(s, std::abs(static_cast<Real>(p.second)));
    }

    using Mat5 = Eigen::Matrix<Real, 5, 5>;
    using Vec5 = Eigen::Matrix<Real, 5, 1>;
    Mat5 a = Mat5::Zero();
    Vec5 b = Vec5::Zero();
    for (const auto& p : pts) {
        const Real t = static_cast<Real>(p.second) / s;
        Vec5 phi;
        phi << 1.0, t, t * t, t * t * t, t * t * t * t;
        a += kappa * (phi * phi.transpose());
        b += kappa * static_cast<Real>(p.first) * phi;
    }
    const auto ldlt = a.ldlt();
    Vec5 x = ldlt.solve(b);
    x += ldlt.solve(b - a * x);  // one refinement pass

    QuarticProfile out;
    out.kappa = kappa;
    out.v_normalizer = s;
    Real sk = 1;
    for (int k = 0; k < 5; ++k) {
        out.gamma[k] = x[k] / sk;
        sk *= s;
    }
    return out;
}

struct GammaResult {
    QuarticProfile profile;
    std::vector<std::pair<int, int>> inliers;
    int iterations = 0;
    Real inlier_fraction = 0;
    bool degraded = false;
};

inline GammaResult ransac_gamma(const std::vector<std::pair<int, int>>& points,
                                const RansacConfig& cfg, Real kappa = 1) {
    auto fit = [kappa](const std::vector<std::pair<int, int>>& smp) {
        return fit_quartic(smp, kappa);
    };
    auto res2 = [](const QuarticProfile& m, const std::pair<int, int>& p) {
        const Real r = static_cast<Real>(p.first) - m.eval(static_cast<Real>(p.second));
        return r * r;
    };
    auto o = detail::ransac_trim<QuarticProfile>(points, cfg, fit, res2);
    GammaResult out;
    out.profile = o.model;
    out.inliers = std::move(o.inliers);
    out.iterations = o.iterations;
    out.inlier_fraction = o.inlier_fraction;
    out.degraded = o.degraded;
    return out;
}

inline GammaResult ransac_gamma(const DpPath& path, const RansacConfig& cfg, Real kappa = 1) {
    return ransac_gamma(path.points, cfg, kappa);
}

inline std::vector<Real> vpx_profile(const QuarticProfile& q, int rows) {
    if (rows < 1) throw Error("vpx: row count must be positive");
    std::vector<Real> out(rows);
    for (int v = 0; v < rows; ++v) out[v] = q.eval(static_cast<Real>(v));
    return out;
}

// Per-row vanishing point, defined on [v_top, v_max].
struct VpProfile {
    int v_top = 0, v_max = 0;
    std::vector<Real> vpx, vpy;  // indexed by image row

    bool defined(int v) const { return v >= v_top && v <= v_max; }
};

}  // namespace lanekit
