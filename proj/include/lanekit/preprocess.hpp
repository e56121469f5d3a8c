#pragma once

#include <cmath>
#include <vector>

#include "image.hpp"
#include "road_profile.hpp"
#include "threading.hpp"

namespace lanekit {

// Pixels that sit on the fitted road surface: valid disparity, within varpi
// of the profile for their row, and at or below the horizon.
inline Mask road_mask(const DisparityMap& disp, const RoadProfile& road, Real varpi) {
    if (disp.empty()) throw Error("road mask: empty disparity map");
    if (disp.height != road.rows) throw Error("road mask: profile row count mismatch");
    Mask m(disp.width, disp.height, 0);
    for (int v = road.horizon; v < disp.height; ++v) {
        const Real fv = road.f(static_cast<Real>(v));
        for (int u = 0; u < disp.width; ++u) {
            const int d = disp.at(u, v);
            if (d != 0 && std::abs(static_cast<Real>(d) - fv) <= varpi) m.at(u, v) = 1;
        }
    }
    return m;
}

// Bilateral smoothing with mirrored borders. Weights are evaluated directly;
// the window is (2*rho+1)^2.
inline GrayImage bilateral_filter(const GrayImage& img, Real sigma_s, Real sigma_r, int rho,
                                  int threads = 1) {
    if (img.empty()) throw Error("bilateral: empty image");
    if (rho < 0) throw Error("bilateral: negative radius");
    if (sigma_s <= 0 || sigma_r <= 0) throw Error("bilateral: sigmas must be positive");
    GrayImage out(img.width, img.height, 0);
    const Real inv_s2 = 1.0 / (sigma_s * sigma_s);
    const Real inv_r2 = 1.0 / (sigma_r * sigma_r);
    parallel_for(0, img.height, threads, [&](int v) {
        for (int u = 0; u < img.width; ++u) {
            const Real center = img.at(u, v);
            Real num = 0, den = 0;
            for (int j = v - rho; j <= v + rho; ++j) {
                const int jj = reflect_index(j, img.height);
                for (int i = u - rho; i <= u + rho; ++i) {
                    const int ii = reflect_index(i, img.width);
                    const Real val = img.at(ii, jj);
                    const Real ds = static_cast<Real>(i - u) * (i - u) +
                                    static_cast<Real>(j - v) * (j - v);
                    const Real dr = val - center;
                    const Real w = std::exp(-ds * inv_s2) * std::exp(-dr * dr * inv_r2);
                    num += w * val;
                    den += w;
                }
            }
            out.at(u, v) = num / den;  // den >= centre weight of 1
        }
    });
    return out;
}

struct GradientField {
    GrayImage gx, gy, magnitude, theta;  // theta: gradient (edge normal) angle, in (-pi, pi]
};

// 3x3 Sobel with mirrored borders. gx responds positively to dark-to-light
// transitions along u, gy likewise along v.
inline GradientField sobel_gradients(const GrayImage& img) {
    if (img.width < 3 || img.height < 3) throw Error("sobel: image smaller than the kernel");
    GradientField g{GrayImage(img.width, img.height, 0), GrayImage(img.width, img.height, 0),
                    GrayImage(img.width, img.height, 0), GrayImage(img.width, img.height, 0)};
    auto px = [&](int u, int v) {
        return img.at(reflect_index(u, img.width), reflect_index(v, img.height));
    };
    for (int v = 0; v < img.height; ++v)
        for (int u = 0; u < img.width; ++u) {
            const Real gx = (px(u + 1, v - 1) - px(u - 1, v - 1)) +
                            2 * (px(u + 1, v) - px(u - 1, v)) +
                            (px(u + 1, v + 1) - px(u - 1, v + 1));
            const Real gy = (px(u - 1, v + 1) - px(u - 1, v - 1)) +
                            2 * (px(u, v + 1) - px(u, v - 1)) +
                            (px(u + 1, v + 1) - px(u + 1, v - 1));
            g.gx.at(u, v) = gx;
            g.gy.at(u, v) = gy;
            g.magnitude.at(u, v) = std::sqrt(gx * gx + gy * gy);
            Real th = std::atan2(gy, gx);
            if (th <= -kPi) th = kPi;
            g.theta.at(u, v) = th;
        }
    return g;
}

struct EdgePixel {
    int u = 0, v = 0;
    Real gx = 0, gy = 0, theta = 0;
};

struct EdgeSet {
    std::vector<EdgePixel> pixels;
};

// Masked edge pixels: gradient magnitude at or above the threshold, inside
// the mask. Threshold is on the same normalized scale as the image values.
inline EdgeSet edge_map(const GradientField& g, Real threshold, const Mask& mask) {
    if (!g.magnitude.same_size(mask)) throw Error("edge map: mask size mismatch");
    EdgeSet out;
    for (int v = 0; v < mask.height; ++v)
        for (int u = 0; u < mask.width; ++u) {
            if (!mask.at(u, v)) continue;
            if (g.magnitude.at(u, v) < threshold) continue;
            out.pixels.push_back({u, v, g.gx.at(u, v), g.gy.at(u, v), g.theta.at(u, v)});
        }
    return out;
}

}  // namespace lanekit
