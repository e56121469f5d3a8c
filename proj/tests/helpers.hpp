#pragma once

// Test-local oracles, deliberately independent of the library's solvers.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lanekit/image.hpp"

namespace testkit {

// Polynomial least squares via long-double normal equations and Gauss-Jordan
// elimination with partial pivoting. No shared code with the Eigen path.
inline std::vector<long double> polyfit_gj(const std::vector<std::pair<double, double>>& pts,
                                           int degree) {
    const int n = degree + 1;
    std::vector<std::vector<long double>> a(n, std::vector<long double>(n + 1, 0.0L));
    for (const auto& [x, y] : pts) {
        std::vector<long double> phi(n, 1.0L);
        for (int k = 1; k < n; ++k) phi[k] = phi[k - 1] * static_cast<long double>(x);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) a[r][c] += phi[r] * phi[c];
            a[r][n] += phi[r] * static_cast<long double>(y);
        }
    }
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(static_cast<double>(a[r][col])) >
                std::fabs(static_cast<double>(a[piv][col])))
                piv = r;
        std::swap(a[piv], a[col]);
        if (a[col][col] == 0.0L) throw std::runtime_error("polyfit_gj: singular system");
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const long double f = a[r][col] / a[col][col];
            for (int c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<long double> out(n);
    for (int r = 0; r < n; ++r) out[r] = a[r][n] / a[r][r];
    return out;
}

inline lanekit::GrayImage random_image(std::uint64_t seed, int w, int h) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    lanekit::GrayImage img(w, h, 0);
    for (auto& x : img.data) x = uni(rng);
    return img;
}

}  // namespace testkit
