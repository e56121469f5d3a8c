#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "image.hpp"
#include "preprocess.hpp"
#include "threading.hpp"
#include "vanish.hpp"

namespace lanekit {

// Orientation gate between an edge tangent and the ray towards the vanishing
// point. Angles are line orientations, so the difference is collapsed mod pi
// into [0, pi/2]. Within pi/6 the weight decays as exp(-(d/sigma_g^2)*(36/pi));
// beyond that the edge cannot belong to a lane and the weight is zero.
inline Real piecewise_weight(Real theta_e, Real theta_vp, Real sigma_g) {
    Real d = std::fmod(std::abs(theta_e - theta_vp), kPi);
    if (d > kPi / 2) d = kPi - d;
    if (d > kPi / 6) return 0;
    return std::exp(-(d / (sigma_g * sigma_g)) * (36 / kPi));
}

// Gradient magnitude weighted by how well each edge points at the vanishing
// point, then box-summed over a (2*nu+1) x (2*varsigma+1) neighbourhood
// (columns x rows, zero padded). Non-edge pixels contribute nothing.
inline GrayImage build_m0(const GradientField& grad, const EdgeSet& edges, const VpProfile& vp,
                          int nu, int varsigma, Real sigma_g) {
    if (grad.gx.empty()) throw Error("m0: empty gradient field");
    if (nu < 0 || varsigma < 0) throw Error("m0: negative box radius");
    GrayImage wg(grad.gx.width, grad.gx.height, 0);
    for (const auto& e : edges.pixels) {
        if (!vp.defined(e.v)) continue;
        const Real dx = vp.vpx[e.v] - e.u;
        const Real dy = vp.vpy[e.v] - e.v;
        if (std::abs(dx) < 1e-12 && std::abs(dy) < 1e-12) continue;  // edge on the point itself
        const Real theta_ray = std::atan2(dy, dx);
        const Real theta_tangent = e.theta + kPi / 2;  // gradient is the edge normal
        wg.at(e.u, e.v) = e.gx * piecewise_weight(theta_tangent, theta_ray, sigma_g);
    }

    GrayImage m0(wg.width, wg.height, 0);
    for (int v = 0; v < wg.height; ++v)
        for (int u = 0; u < wg.width; ++u) {
            Real s = 0;
            for (int y = -varsigma; y <= varsigma; ++y) {
                const int vv = v + y;
                if (vv < 0 || vv >= wg.height) continue;
                for (int x = -nu; x <= nu; ++x) {
                    const int uu = u + x;
                    if (uu < 0 || uu >= wg.width) continue;
                    s += wg.at(uu, vv);
                }
            }
            m0.at(u, v) = s;
        }
    return m0;
}

// Convolution of m0 with the separable response kernel [1,2,1]^T x [1,0,-1],
// which works out to the same stencil as the horizontal derivative above.
// A lane produces a positive and a negative rim; between them this goes
// strongly negative, which is what the energy minimisation looks for.
inline GrayImage build_m1(const GrayImage& m0) {
    if (m0.width < 3 || m0.height < 3) throw Error("m1: image smaller than the kernel");
    GrayImage m1(m0.width, m0.height, 0);
    for (int v = 1; v < m0.height - 1; ++v)
        for (int u = 1; u < m0.width - 1; ++u)
            m1.at(u, v) = (m0.at(u + 1, v - 1) - m0.at(u - 1, v - 1)) +
                          2 * (m0.at(u + 1, v) - m0.at(u - 1, v)) +
                          (m0.at(u + 1, v + 1) - m0.at(u - 1, v + 1));
    return m1;
}

// Lane trajectory seeded at an extended bottom column and propagated upward
// row by row: each segment aims at the vanishing point of the row below.
// Index i holds the column at row v_top + i; NaN marks truncated rows. The
// recursion stops when the next row's vanishing point collapses onto the row
// itself (denominator under half a row).
inline std::vector<Real> lane_track(Real u_bottom, const VpProfile& vp) {
    if (vp.v_top > vp.v_max) throw Error("lane track: empty row range");
    const int n = vp.v_max - vp.v_top + 1;
    std::vector<Real> track(n, std::numeric_limits<Real>::quiet_NaN());
    track[n - 1] = u_bottom;
    for (int v = vp.v_max - 1; v >= vp.v_top; --v) {
        const Real u_next = track[v + 1 - vp.v_top];
        const Real vpy = vp.vpy[v + 1];
        const Real denom = static_cast<Real>(v + 1) - vpy;
        if (std::abs(denom) < 0.5) break;
        track[v - vp.v_top] = (vp.vpx[v + 1] + v * u_next - vpy * u_next) / denom;
    }
    return track;
}

struct EnergyHistogram {
    std::vector<Real> h;  // one energy per extended bottom column
    int ext_lo = 0;
};

// Accumulated m1 along the track of every candidate bottom column, bottom to
// top with decay lambda_g. Samples outside the image (or past a truncation)
// contribute zero.
inline EnergyHistogram aggregate_energy(const GrayImage& m1, const VpProfile& vp, Real xi,
                                        Real lambda_g, int threads = 1) {
    if (m1.empty()) throw Error("energy: empty response map");
    EnergyHistogram out;
    out.ext_lo = extended_col_lo(xi, m1.width);
    const int cols = extended_col_count(xi, m1.width);
    out.h.assign(cols, 0);
    parallel_for(0, cols, threads, [&](int ci) {
        const auto track = lane_track(static_cast<Real>(out.ext_lo + ci), vp);
        Real e = 0;
        for (int v = vp.v_max; v >= vp.v_top; --v) {
            Real contrib = 0;
            const Real tu = track[v - vp.v_top];
            if (!std::isnan(tu)) {
                const long long r = std::llround(tu);
                if (r >= 0 && r < m1.width && v >= 0 && v < m1.height)
                    contrib = m1.at(static_cast<int>(r), v);
            }
            e = contrib + lambda_g * e;
        }
        out.h[ci] = e;
    });
    return out;
}

struct Lane {
    int bottom_col = 0;  // extended column seeding the track
    Real energy = 0;
    std::vector<std::pair<int, Real>> polyline;  // (v, u), v ascending
};

struct LaneSet {
    std::vector<Lane> lanes;  // strongest (most negative energy) first
};

// Strict interior local minima of the histogram below the threshold, then
// greedy suppression: candidates are visited strongest first and dropped
// when an accepted lane sits closer than min_sep columns.
inline LaneSet select_lanes(const EnergyHistogram& hist, Real tr_lpv, int min_sep,
                            const VpProfile& vp) {
    const int n = static_cast<int>(hist.h.size());
    std::vector<int> cand;
    for (int i = 1; i + 1 < n; ++i)
        if (hist.h[i] < hist.h[i - 1] && hist.h[i] < hist.h[i + 1] && hist.h[i] < tr_lpv)
            cand.push_back(i);
    std::sort(cand.begin(), cand.end(), [&](int a, int b) {
        if (hist.h[a] != hist.h[b]) return hist.h[a] < hist.h[b];
        return a < b;
    });

    LaneSet out;
    std::vector<int> kept;
    for (const int i : cand) {
        bool close = false;
        for (const int k : kept)
            if (std::abs(i - k) < min_sep) {
                close = true;
                break;
            }
        if (close) continue;
        kept.push_back(i);
        Lane lane;
        lane.bottom_col = hist.ext_lo + i;
        lane.energy = hist.h[i];
        const auto track = lane_track(static_cast<Real>(lane.bottom_col), vp);
        for (int v = vp.v_top; v <= vp.v_max; ++v) {
            const Real tu = track[v - vp.v_top];
            if (!std::isnan(tu)) lane.polyline.emplace_back(v, tu);
        }
        out.lanes.push_back(std::move(lane));
    }
    return out;
}

// Automatic selection threshold: a fixed fraction of the 99th percentile of
// |m1| over the road rows, scaled by the number of rows a full track spans.
inline Real auto_lane_threshold(const GrayImage& m1, int v_top, int v_max) {
    if (v_top > v_max) throw Error("lane threshold: empty row range");
    std::vector<Real> mags;
    mags.reserve(static_cast<size_t>(v_max - v_top + 1) * m1.width);
    for (int v = std::max(0, v_top); v <= std::min(m1.height - 1, v_max); ++v)
        for (int u = 0; u < m1.width; ++u) mags.push_back(std::abs(m1.at(u, v)));
    if (mags.empty()) return 0;
    const size_t k = static_cast<size_t>(std::floor(0.99 * (mags.size() - 1)));
    std::nth_element(mags.begin(), mags.begin() + k, mags.end());
    const Real p99 = mags[k];
    return -0.15 * static_cast<Real>(v_max - v_top + 1) * p99;
}

}  // namespace lanekit
