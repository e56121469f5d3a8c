#pragma once

// Brute-force reference implementations used by the test suite. Each one is
// written directly from its defining formula and shares no code with the fast
// paths it is used to check. Keep it that way.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "image.hpp"

namespace lanekit::oracle {

// Direct block sum by double loop.
template <typename T>
Real oracle_block_sum(const Image<T>& img, int u, int v, int rho) {
    if (rho < 0 || u - rho < 0 || v - rho < 0 || u + rho >= img.width || v + rho >= img.height)
        throw Error("oracle_block_sum: block out of bounds");
    Real s = 0;
    for (int y = v - rho; y <= v + rho; ++y)
        for (int x = u - rho; x <= u + rho; ++x) s += static_cast<Real>(img.at(x, y));
    return s;
}

// Textbook normalized cross-correlation between the (2*rho+1)^2 blocks
// centred at (ul, vl) in left and (ur, vr) in right: means, deviations and
// the dot product all come from direct loops.
inline Real oracle_ncc_direct(const GrayImage& left, const GrayImage& right,
                              int ul, int vl, int ur, int vr, int rho) {
    const int n = (2 * rho + 1) * (2 * rho + 1);
    Real mul = 0, mur = 0;
    for (int y = -rho; y <= rho; ++y)
        for (int x = -rho; x <= rho; ++x) {
            mul += left.at(ul + x, vl + y);
            mur += right.at(ur + x, vr + y);
        }
    mul /= n;
    mur /= n;
    Real num = 0, sl = 0, sr = 0;
    for (int y = -rho; y <= rho; ++y)
        for (int x = -rho; x <= rho; ++x) {
            const Real a = left.at(ul + x, vl + y) - mul;
            const Real b = right.at(ur + x, vr + y) - mur;
            num += a * b;
            sl += a * a;
            sr += b * b;
        }
    const Real denom = std::sqrt(sl) * std::sqrt(sr);
    if (denom == 0) throw Error("oracle_ncc_direct: zero-variance block");
    return num / denom;
}

// Direct bilateral response at one pixel, mirrored borders.
inline Real oracle_bilateral(const GrayImage& img, int u, int v,
                             Real sigma_s, Real sigma_r, int rho) {
    auto mirror = [](int i, int n) {
        if (n <= 1) return 0;
        while (i < 0 || i >= n) {
            if (i < 0) i = -i - 1;
            if (i >= n) i = 2 * n - 1 - i;
        }
        return i;
    };
    const Real centre = img.at(u, v);
    Real num = 0, den = 0;
    for (int j = v - rho; j <= v + rho; ++j)
        for (int i = u - rho; i <= u + rho; ++i) {
            const Real val = img.at(mirror(i, img.width), mirror(j, img.height));
            const Real ws = std::exp(-(Real(i - u) * (i - u) + Real(j - v) * (j - v)) /
                                     (sigma_s * sigma_s));
            const Real wr = std::exp(-(val - centre) * (val - centre) / (sigma_r * sigma_r));
            num += ws * wr * val;
            den += ws * wr;
        }
    return num / den;
}

// Median of the (2*rho+1)^2 window, mirrored borders. Kept as a comparison
// reference for the bilateral filter, nothing in the pipeline uses it.
inline GrayImage oracle_median_filter(const GrayImage& img, int rho) {
    auto mirror = [](int i, int n) {
        if (n <= 1) return 0;
        while (i < 0 || i >= n) {
            if (i < 0) i = -i - 1;
            if (i >= n) i = 2 * n - 1 - i;
        }
        return i;
    };
    GrayImage out(img.width, img.height);
    std::vector<Real> window;
    for (int v = 0; v < img.height; ++v)
        for (int u = 0; u < img.width; ++u) {
            window.clear();
            for (int j = v - rho; j <= v + rho; ++j)
                for (int i = u - rho; i <= u + rho; ++i)
                    window.push_back(img.at(mirror(i, img.width), mirror(j, img.height)));
            auto mid = window.begin() + window.size() / 2;
            std::nth_element(window.begin(), mid, window.end());
            out.at(u, v) = *mid;
        }
    return out;
}

// The accumulator band covering row v. Bands grow cumulatively from the
// bottom row, slide as a centred window of 2*chi+1 rows in the middle, and
// thin against the top of the valid range.
struct BandRange { int top; int bottom; };

inline BandRange oracle_band_range(int v, int v_top, int v_max, int chi) {
    if (v > v_max - chi - 1) return {v, v_max};                       // growing
    if (v >= v_top + chi) return {v - chi, v + chi};                  // full window
    return {v_top, v + chi};                                          // thinning
}

// Count-the-votes reference for one accumulator cell. votes are
// (column, row) pairs in the accumulator's column coordinates.
inline Real oracle_band_sum(const std::vector<std::pair<int, int>>& votes,
                            int u, int v, int v_top, int v_max, int chi, Real rho_vote) {
    const BandRange band = oracle_band_range(v, v_top, v_max, chi);
    long count = 0;
    for (const auto& [col, row] : votes)
        if (col == u && row >= band.top && row <= band.bottom) ++count;
    return -rho_vote * static_cast<Real>(count);
}

// Exhaustive enumeration of every feasible path through a stage/state DP.
// data(stage, state) is added at each visited cell; a step to the next stage
// lands on state - offset (the state at the previous stage is the next one
// plus the offset), adding penalty(offset). Intended for small instances
// only; bails out once max_paths complete paths have been visited.
// Tie-breaking between equal-energy paths is whatever the enumeration order
// yields, so comparisons should use instances with a unique optimum
// (continuous data).
struct DpEnumInstance {
    int stages = 0;
    int states = 0;
    std::function<Real(int, int)> data;
    std::vector<int> offsets;             // state delta from one stage to the next
    std::function<Real(int)> penalty;     // penalty(offset)
    long long max_paths = 1'000'000;
};

struct DpEnumResult {
    Real energy = 0;
    std::vector<int> path;                // path[stage] = state
};

inline DpEnumResult oracle_dp_enumerate(const DpEnumInstance& inst) {
    if (inst.stages <= 0 || inst.states <= 0)
        throw Error("oracle_dp_enumerate: empty instance");
    DpEnumResult best;
    bool found = false;
    long long paths = 0;
    std::vector<int> cur(inst.stages);

    std::function<void(int, int, Real)> extend = [&](int stage, int state, Real energy) {
        cur[stage] = state;
        energy += inst.data(stage, state);
        if (stage == inst.stages - 1) {
            if (++paths > inst.max_paths)
                throw Error("oracle_dp_enumerate: instance too large for enumeration");
            if (!found || energy < best.energy) {
                found = true;
                best.energy = energy;
                best.path = cur;
            }
            return;
        }
        for (int off : inst.offsets) {
            const int ns = state - off;
            if (ns < 0 || ns >= inst.states) continue;
            extend(stage + 1, ns, energy + inst.penalty(off));
        }
    };
    for (int s0 = 0; s0 < inst.states; ++s0) extend(0, s0, 0);
    if (!found) throw Error("oracle_dp_enumerate: no feasible path");
    return best;
}

// Number of complete paths whose energy lies within tol of the optimum.
// Lets callers reject degenerate (tied) instances before comparing paths.
inline long long oracle_dp_count_optima(const DpEnumInstance& inst, Real tol) {
    const DpEnumResult best = oracle_dp_enumerate(inst);
    long long ties = 0;
    std::function<void(int, int, Real)> extend = [&](int stage, int state, Real energy) {
        energy += inst.data(stage, state);
        if (stage == inst.stages - 1) {
            if (energy <= best.energy + tol) ++ties;
            return;
        }
        for (int off : inst.offsets) {
            const int ns = state - off;
            if (ns < 0 || ns >= inst.states) continue;
            extend(stage + 1, ns, energy + inst.penalty(off));
        }
    };
    for (int s0 = 0; s0 < inst.states; ++s0) extend(0, s0, 0);
    return ties;
}

}  // namespace lanekit::oracle
