#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include "image.hpp"
#include "integral.hpp"
#include "threading.hpp"

namespace lanekit {

struct StereoConfig {
    int rho = 3;              // block radius, block side = 2*rho+1
    int d_min = 0;
    int d_max = 64;
    int tau = 1;              // search-range propagation bound
    int tr_lrc = 3;           // left-right consistency tolerance
    Real sigma_floor = 1e-4;  // blocks with sigma below this are unmatchable
    int threads = 1;
};

// Which image the disparity map is referenced to. Left-referenced matching
// shifts right-image blocks by -d, right-referenced shifts left blocks by +d.
enum class RefView { left, right };

// Per-pixel block mean and standard deviation, memoised from two integral
// images (intensity and squared intensity). Border pixels whose block leaves
// the image keep mu = sigma = 0, which makes them unmatchable.
struct BlockStats {
    GrayImage mu;
    GrayImage sigma;
    int rho = 0;
};

inline BlockStats precompute_stats(const GrayImage& img, int rho) {
    if (rho < 0) throw Error("precompute_stats: negative rho");
    if (img.width < 2 * rho + 1 || img.height < 2 * rho + 1)
        throw Error("precompute_stats: image smaller than block");
    GrayImage sq(img.width, img.height);
    for (size_t i = 0; i < img.size(); ++i) sq.data[i] = img.data[i] * img.data[i];
    const IntegralImage in = build_integral(img);
    const IntegralImage in2 = build_integral(sq);

    BlockStats st;
    st.rho = rho;
    st.mu = GrayImage(img.width, img.height, 0.0);
    st.sigma = GrayImage(img.width, img.height, 0.0);
    const Real n = Real(2 * rho + 1) * Real(2 * rho + 1);
    for (int v = rho; v < img.height - rho; ++v) {
        for (int u = rho; u < img.width - rho; ++u) {
            const Real mu = block_sum(in, u, v, rho) / n;
            const Real var = block_sum(in2, u, v, rho) / n - mu * mu;
            st.mu.at(u, v) = mu;
            st.sigma.at(u, v) = std::sqrt(std::max(Real(0), var));
        }
    }
    return st;
}

// Factorised NCC between the left block centred at (ul, v) and the right
// block at (ur, v): only the raw dot product is computed here, means and
// deviations come from the memoised stats.
inline Real ncc_cost(const GrayImage& left, const GrayImage& right,
                     const BlockStats& ls, const BlockStats& rs,
                     int ul, int ur, int v, Real sigma_floor) {
    const int rho = ls.rho;
    const Real sl = ls.sigma.at(ul, v);
    const Real sr = rs.sigma.at(ur, v);
    if (!(sl >= sigma_floor) || !(sr >= sigma_floor))
        throw Error("ncc_cost: block deviation below floor");
    Real dot = 0;
    for (int y = -rho; y <= rho; ++y) {
        const Real* pl = &left.at(ul - rho, v + y);
        const Real* pr = &right.at(ur - rho, v + y);
        for (int x = 0; x <= 2 * rho; ++x) dot += pl[x] * pr[x];
    }
    const Real n = Real(2 * rho + 1) * Real(2 * rho + 1);
    return (dot - n * ls.mu.at(ul, v) * rs.mu.at(ur, v)) / (n * sl * sr);
}

namespace detail {

// Up to three clamped candidate intervals, iterated in ascending order.
struct SearchRanges {
    std::array<std::pair<int, int>, 3> iv{};
    int count = 0;

    void add(int lo, int hi, int d_min, int d_max) {
        lo = std::max(lo, d_min);
        hi = std::min(hi, d_max);
        if (lo > hi) return;
        iv[count++] = {lo, hi};
    }

    template <typename Fn>
    void for_each_ascending(Fn&& fn) const {
        std::array<std::pair<int, int>, 3> s{};
        for (int i = 0; i < count; ++i) s[i] = iv[i];
        std::sort(s.begin(), s.begin() + count);
        int next = std::numeric_limits<int>::min();
        for (int i = 0; i < count; ++i) {
            for (int d = std::max(s[i].first, next); d <= s[i].second; ++d) fn(d);
            next = std::max(next, s[i].second + 1);
        }
    }
};

// One row of search-range-propagated matching. For each reference pixel the
// candidate disparities come from ranges; the best (highest NCC, smallest d
// on ties) wins. other_col = u - d for left reference, u + d for right.
template <typename RangeFn>
void match_row(const GrayImage& ref, const GrayImage& other,
               const BlockStats& ref_stats, const BlockStats& other_stats,
               RefView view, const StereoConfig& cfg, int v,
               RangeFn&& ranges_for, DisparityMap& out) {
    const int rho = cfg.rho;
    const int w = ref.width;
    auto match_pixel = [&](int u) {
        if (ref_stats.sigma.at(u, v) < cfg.sigma_floor) {
            out.at(u, v) = 0;
            return;
        }
        Real best_cost = 0;
        int best_d = -1;
        auto try_d = [&](int d) {
            const int uo = (view == RefView::left) ? u - d : u + d;
            if (uo < rho || uo >= w - rho) return;
            if (other_stats.sigma.at(uo, v) < cfg.sigma_floor) return;
            const Real c = ncc_cost(view == RefView::left ? ref : other,
                                    view == RefView::left ? other : ref,
                                    view == RefView::left ? ref_stats : other_stats,
                                    view == RefView::left ? other_stats : ref_stats,
                                    view == RefView::left ? u : uo,
                                    view == RefView::left ? uo : u,
                                    v, cfg.sigma_floor);
            if (best_d < 0 || c > best_cost) {
                best_cost = c;
                best_d = d;
            }
        };
        ranges_for(u).for_each_ascending(try_d);
        out.at(u, v) = (best_d < 0) ? 0 : best_d;
    };
    parallel_for(rho, w - rho, cfg.threads, match_pixel);
}

}  // namespace detail

// Search-range-propagated block matching. Rows run bottom to top; the lowest
// matchable row searches the full range, every later row searches the union
// of [l(k, v+1) - tau, l(k, v+1) + tau] over the three neighbours below.
inline DisparityMap match_srp(const GrayImage& ref, const GrayImage& other,
                              const BlockStats& ref_stats, const BlockStats& other_stats,
                              RefView view, const StereoConfig& cfg) {
    if (!ref.same_size(other)) throw Error("match_srp: image sizes differ");
    if (cfg.d_min < 0 || cfg.d_max < cfg.d_min) throw Error("match_srp: bad disparity range");
    const int rho = cfg.rho;
    const int w = ref.width, h = ref.height;
    if (w < 2 * rho + 1 || h < 2 * rho + 1) throw Error("match_srp: image smaller than block");
    DisparityMap disp(w, h, 0);

    const int v_bottom = h - 1 - rho;
    detail::SearchRanges full;
    full.add(cfg.d_min, cfg.d_max, cfg.d_min, cfg.d_max);
    detail::match_row(ref, other, ref_stats, other_stats, view, cfg, v_bottom,
                      [&](int) { return full; }, disp);

    for (int v = v_bottom - 1; v >= rho; --v) {
        detail::match_row(ref, other, ref_stats, other_stats, view, cfg, v,
                          [&](int u) {
                              detail::SearchRanges sr;
                              for (int k = u - 1; k <= u + 1; ++k) {
                                  if (k < 0 || k >= w) continue;
                                  const int l = disp.at(k, v + 1);
                                  sr.add(l - cfg.tau, l + cfg.tau, cfg.d_min, cfg.d_max);
                              }
                              if (sr.count == 0)  // every interval clamped away
                                  sr.add(cfg.d_min, cfg.d_max, cfg.d_min, cfg.d_max);
                              return sr;
                          },
                          disp);
    }
    return disp;
}

inline DisparityMap estimate_disparity_srp(const GrayImage& left, const GrayImage& right,
                                           const StereoConfig& cfg,
                                           RefView view = RefView::left) {
    const BlockStats ls = precompute_stats(left, cfg.rho);
    const BlockStats rs = precompute_stats(right, cfg.rho);
    return (view == RefView::left) ? match_srp(left, right, ls, rs, RefView::left, cfg)
                                   : match_srp(right, left, rs, ls, RefView::right, cfg);
}

// Full-range matching with memoised stats on every row (no propagation).
inline DisparityMap match_full_memo(const GrayImage& ref, const GrayImage& other,
                                    const BlockStats& ref_stats, const BlockStats& other_stats,
                                    RefView view, const StereoConfig& cfg) {
    if (!ref.same_size(other)) throw Error("match_full_memo: image sizes differ");
    const int rho = cfg.rho;
    DisparityMap disp(ref.width, ref.height, 0);
    detail::SearchRanges full;
    full.add(cfg.d_min, cfg.d_max, cfg.d_min, cfg.d_max);
    for (int v = ref.height - 1 - rho; v >= rho; --v)
        detail::match_row(ref, other, ref_stats, other_stats, view, cfg, v,
                          [&](int) { return full; }, disp);
    return disp;
}

// Full-range matching that recomputes every mean and deviation per candidate
// block pair. Kept as the no-memoisation baseline for benchmarks.
inline DisparityMap match_full_naive(const GrayImage& ref, const GrayImage& other,
                                     RefView view, const StereoConfig& cfg) {
    if (!ref.same_size(other)) throw Error("match_full_naive: image sizes differ");
    const int rho = cfg.rho;
    const int w = ref.width, h = ref.height;
    if (w < 2 * rho + 1 || h < 2 * rho + 1) throw Error("match_full_naive: image too small");
    const Real n = Real(2 * rho + 1) * Real(2 * rho + 1);
    DisparityMap disp(w, h, 0);

    auto block_stats = [&](const GrayImage& img, int u, int v, Real& mu, Real& sigma) {
        Real s = 0, s2 = 0;
        for (int y = -rho; y <= rho; ++y)
            for (int x = -rho; x <= rho; ++x) {
                const Real val = img.at(u + x, v + y);
                s += val;
                s2 += val * val;
            }
        mu = s / n;
        sigma = std::sqrt(std::max(Real(0), s2 / n - mu * mu));
    };

    for (int v = h - 1 - rho; v >= rho; --v) {
        for (int u = rho; u < w - rho; ++u) {
            Real best_cost = 0;
            int best_d = -1;
            for (int d = cfg.d_min; d <= cfg.d_max; ++d) {
                const int uo = (view == RefView::left) ? u - d : u + d;
                if (uo < rho || uo >= w - rho) continue;
                Real mur, sr, mul, sl;
                block_stats(ref, u, v, mul, sl);
                block_stats(other, uo, v, mur, sr);
                if (sl < cfg.sigma_floor || sr < cfg.sigma_floor) continue;
                Real dot = 0;
                for (int y = -rho; y <= rho; ++y)
                    for (int x = -rho; x <= rho; ++x)
                        dot += ref.at(u + x, v + y) * other.at(uo + x, v + y);
                const Real c = (dot - n * mul * mur) / (n * sl * sr);
                if (best_d < 0 || c > best_cost) {
                    best_cost = c;
                    best_d = d;
                }
            }
            disp.at(u, v) = (best_d < 0) ? 0 : best_d;
        }
    }
    return disp;
}

// Left-right consistency: keep l_lf(u, v) when the right map agrees within
// tr at the re-projected column, otherwise invalidate to 0.
inline DisparityMap lrc_check(const DisparityMap& lf, const DisparityMap& rt, int tr) {
    if (!lf.same_size(rt)) throw Error("lrc_check: map sizes differ");
    DisparityMap out(lf.width, lf.height, 0);
    for (int v = 0; v < lf.height; ++v)
        for (int u = 0; u < lf.width; ++u) {
            const int d = lf.at(u, v);
            const int ur = u - d;
            if (ur < 0 || ur >= lf.width) continue;
            if (std::abs(d - rt.at(ur, v)) <= tr) out.at(u, v) = d;
        }
    return out;
}

}  // namespace lanekit
