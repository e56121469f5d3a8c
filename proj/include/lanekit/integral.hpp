#pragma once

#include <vector>

#include "image.hpp"

namespace lanekit {

// Summed-area table: sum(u, v) = sum of I(i, j) over i <= u, j <= v.
// Indices -1 act as a virtual zero row/column.
struct IntegralImage {
    int width = 0;
    int height = 0;
    std::vector<Real> sum;

    Real at(int u, int v) const {
        if (u < 0 || v < 0) return Real(0);
        return sum[static_cast<size_t>(v) * width + u];
    }
};

template <typename T>
IntegralImage build_integral(const Image<T>& img) {
    if (img.empty()) throw Error("build_integral: empty image");
    IntegralImage in;
    in.width = img.width;
    in.height = img.height;
    in.sum.resize(img.size());
    for (int v = 0; v < img.height; ++v) {
        for (int u = 0; u < img.width; ++u) {
            in.sum[static_cast<size_t>(v) * in.width + u] =
                in.at(u, v - 1) + in.at(u - 1, v) - in.at(u - 1, v - 1) +
                static_cast<Real>(img.at(u, v));
        }
    }
    return in;
}

// Sum over the (2*rho+1)^2 block centred at (u, v) from four corner reads.
// The block must lie fully inside the image.
inline Real block_sum(const IntegralImage& in, int u, int v, int rho) {
    if (rho < 0 || u - rho < 0 || v - rho < 0 || u + rho >= in.width || v + rho >= in.height)
        throw Error("block_sum: block out of bounds");
    const Real r1 = in.at(u + rho, v + rho);
    const Real r2 = in.at(u - rho - 1, v - rho - 1);
    const Real r3 = in.at(u - rho - 1, v + rho);
    const Real r4 = in.at(u + rho, v - rho - 1);
    return r1 + r2 - r3 - r4;
}

}  // namespace lanekit
