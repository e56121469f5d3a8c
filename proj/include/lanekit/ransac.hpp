#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "common.hpp"

namespace lanekit {

struct RansacConfig {
    Real tolerance = 4.0;        // squared-residual inlier bound
    Real inlier_fraction = 0.99; // consensus stop threshold
    int sample_size = 3;
    int max_iterations = 200;
    uint64_t rng_seed = 1;
};

namespace detail {

// Trimming RANSAC: each iteration samples from the current candidate set,
// fits, and classifies the whole set. A fit may remove the outliers only if
// it explains a majority and beats the best consensus so far; without that
// gate a single bad first sample would permanently discard the true inliers.
// The candidate set therefore never grows.
template <typename Model>
struct RansacOutcome {
    Model model{};
    std::vector<std::pair<int, int>> inliers;
    int iterations = 0;
    Real inlier_fraction = 0;
    bool degraded = false;
};

template <typename Model, typename FitFn, typename Residual2Fn>
RansacOutcome<Model> ransac_trim(
    const std::vector<std::pair<int, int>>& points, const RansacConfig& par,
    FitFn&& fit, Residual2Fn&& residual2) {
    const int k = par.sample_size;
    if (static_cast<int>(points.size()) < k)
        throw Error("ransac: fewer points than the sample size");

    std::mt19937_64 rng(par.rng_seed);
    std::vector<std::pair<int, int>> m = points;
    std::vector<int> idx;
    std::vector<std::pair<int, int>> sample(k), inl;

    RansacOutcome<Model> out;
    Real best_fraction = -1;
    Model best_model{};
    bool have_model = false;

    for (int iter = 0; iter < par.max_iterations; ++iter) {
        out.iterations = iter + 1;
        if (static_cast<int>(m.size()) < k) break;

        idx.resize(m.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
        for (int i = 0; i < k; ++i) {
            const size_t j = i + static_cast<size_t>(rng() % (idx.size() - i));
            std::swap(idx[i], idx[j]);
            sample[i] = m[idx[i]];
        }

        Model model;
        try {
            model = fit(sample);
        } catch (const Error&) {
            continue;  // degenerate sample, iteration consumed
        }

        inl.clear();
        for (const auto& p : m)
            if (residual2(model, p) < par.tolerance) inl.push_back(p);
        const Real fraction = static_cast<Real>(inl.size()) / static_cast<Real>(m.size());

        if (fraction > best_fraction) {
            best_fraction = fraction;
            best_model = model;
            have_model = true;
        }
        if (fraction >= best_fraction && fraction > Real(0.5) &&
            static_cast<int>(inl.size()) >= k) {
            m = inl;  // trim to the consensus set
        }
        if (best_fraction >= par.inlier_fraction) break;
    }

    if (!have_model) throw Error("ransac: no sample produced a fit");

    // Final model from the inliers of the best consensus. The refit then
    // re-classifies the full point set for a few rounds: a minimal sample
    // model is wiggly and tends to drop points near the ends of the range,
    // and the least-squares refit wins those back.
    inl.clear();
    for (const auto& p : m)
        if (residual2(best_model, p) < par.tolerance) inl.push_back(p);
    out.model = best_model;
    for (int round = 0; round < 3 && static_cast<int>(inl.size()) >= k; ++round) {
        Model refit;
        try {
            refit = fit(inl);
        } catch (const Error&) {
            break;  // keep the previous model
        }
        out.model = refit;
        std::vector<std::pair<int, int>> next;
        for (const auto& p : points)
            if (residual2(refit, p) < par.tolerance) next.push_back(p);
        const bool settled = next == inl;
        inl = std::move(next);
        if (settled) break;
    }
    out.inliers = inl.empty() ? m : inl;
    out.inlier_fraction = best_fraction;
    out.degraded = best_fraction < par.inlier_fraction;
    return out;
}

}  // namespace detail

}  // namespace lanekit
