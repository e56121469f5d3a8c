#pragma once

#include <cstdint>
#include <vector>

#include "common.hpp"

namespace lanekit {

// Row-major grid addressed as (u, v) = (column, row). v grows downwards.
template <typename T>
struct Image {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Image() = default;
    Image(int w, int h, T fill = T{})
        : width(w), height(h), data(static_cast<size_t>(w) * static_cast<size_t>(h), fill) {
        if (w < 0 || h < 0) throw Error("Image: negative dimensions");
    }

    T& at(int u, int v) { return data[static_cast<size_t>(v) * width + u]; }
    const T& at(int u, int v) const { return data[static_cast<size_t>(v) * width + u]; }

    bool inside(int u, int v) const { return u >= 0 && u < width && v >= 0 && v < height; }
    bool empty() const { return width == 0 || height == 0; }
    size_t size() const { return data.size(); }

    template <typename U>
    bool same_size(const Image<U>& o) const { return width == o.width && height == o.height; }
};

using GrayImage = Image<Real>;      // intensities normalized to [0, 1]
using DisparityMap = Image<int>;    // integer disparities; 0 doubles as the invalid marker
using Mask = Image<uint8_t>;        // 0 / 1

}  // namespace lanekit
