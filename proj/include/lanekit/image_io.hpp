#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "image.hpp"

namespace lanekit {

struct Rgb {
    uint8_t r = 0, g = 0, b = 0;
};
using RgbImage = Image<Rgb>;

// ---------------------------------------------------------------------- PGM

inline void write_pgm8(const std::string& path, const Image<uint8_t>& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("pgm: cannot open " + path + " for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size()));
    if (!out) throw Error("pgm: write failed for " + path);
}

inline void write_pgm16(const std::string& path, const Image<uint16_t>& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("pgm: cannot open " + path + " for writing");
    out << "P5\n" << img.width << " " << img.height << "\n65535\n";
    std::vector<uint8_t> raster(img.data.size() * 2);
    for (size_t i = 0; i < img.data.size(); ++i) {
        raster[2 * i] = static_cast<uint8_t>(img.data[i] >> 8);  // big-endian
        raster[2 * i + 1] = static_cast<uint8_t>(img.data[i] & 0xff);
    }
    out.write(reinterpret_cast<const char*>(raster.data()),
              static_cast<std::streamsize>(raster.size()));
    if (!out) throw Error("pgm: write failed for " + path);
}

namespace detail {

inline long pgm_token(std::istream& in, const std::string& path) {
    // next integer, skipping whitespace and '#' comment lines
    for (;;) {
        const int c = in.peek();
        if (c == EOF) throw Error("pgm: truncated header in " + path);
        if (c == '#') {
            std::string skip;
            std::getline(in, skip);
            continue;
        }
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        break;
    }
    long value = 0;
    in >> value;
    if (!in) throw Error("pgm: bad header token in " + path);
    return value;
}

}  // namespace detail

// Reads binary P5 with maxval up to 65535 (two-byte samples are big-endian).
inline Image<uint16_t> read_pgm(const std::string& path, int* maxval_out = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("pgm: cannot open " + path);
    char m0 = 0, m1 = 0;
    in.get(m0).get(m1);
    if (m0 != 'P' || m1 != '5') throw Error("pgm: " + path + " is not binary P5");
    const long w = detail::pgm_token(in, path);
    const long h = detail::pgm_token(in, path);
    const long maxval = detail::pgm_token(in, path);
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
        throw Error("pgm: bad dimensions in " + path);
    if (maxval_out) *maxval_out = static_cast<int>(maxval);
    in.get();  // single whitespace before the raster

    Image<uint16_t> img(static_cast<int>(w), static_cast<int>(h), 0);
    if (maxval < 256) {
        std::vector<uint8_t> raster(img.data.size());
        in.read(reinterpret_cast<char*>(raster.data()),
                static_cast<std::streamsize>(raster.size()));
        if (!in) throw Error("pgm: truncated raster in " + path);
        for (size_t i = 0; i < raster.size(); ++i) img.data[i] = raster[i];
    } else {
        std::vector<uint8_t> raster(img.data.size() * 2);
        in.read(reinterpret_cast<char*>(raster.data()),
                static_cast<std::streamsize>(raster.size()));
        if (!in) throw Error("pgm: truncated raster in " + path);
        for (size_t i = 0; i < img.data.size(); ++i)
            img.data[i] = static_cast<uint16_t>((raster[2 * i] << 8) | raster[2 * i + 1]);
    }
    return img;
}

// ---------------------------------------------------------------------- PNG

// Reads any libpng-supported colour layout as 8-bit grayscale normalized to
// [0, 1].
inline GrayImage read_png_gray(const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw Error("png: cannot open " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw Error("png: reader init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw Error("png: read failed for " + path);
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    png_set_expand(png);  // palettes, low bit depths, tRNS
    if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
    const png_byte color = png_get_color_type(png, info);
    if (color & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray(png, 1, -1, -1);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    std::vector<uint8_t> raster(static_cast<size_t>(w) * h);
    std::vector<png_bytep> rows(h);
    for (int v = 0; v < h; ++v) rows[v] = raster.data() + static_cast<size_t>(v) * w;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);

    GrayImage out(w, h, 0);
    for (size_t i = 0; i < raster.size(); ++i) out.data[i] = raster[i] / 255.0;
    return out;
}

namespace detail {

inline void write_png(const std::string& path, int width, int height, int color_type,
                      const std::vector<uint8_t>& raster, size_t stride) {
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw Error("png: cannot open " + path + " for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw Error("png: writer init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw Error("png: write failed for " + path);
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(height);
    for (int v = 0; v < height; ++v)
        rows[v] = const_cast<png_bytep>(raster.data() + static_cast<size_t>(v) * stride);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

}  // namespace detail

inline void write_png_gray(const std::string& path, const GrayImage& img) {
    if (img.empty()) throw Error("png: empty image");
    std::vector<uint8_t> raster(img.data.size());
    for (size_t i = 0; i < img.data.size(); ++i) {
        const long q = std::lround(img.data[i] * 255.0);
        raster[i] = static_cast<uint8_t>(std::clamp(q, 0L, 255L));
    }
    detail::write_png(path, img.width, img.height, PNG_COLOR_TYPE_GRAY, raster,
                      static_cast<size_t>(img.width));
}

inline void write_png_rgb(const std::string& path, const RgbImage& img) {
    if (img.empty()) throw Error("png: empty image");
    std::vector<uint8_t> raster(img.data.size() * 3);
    for (size_t i = 0; i < img.data.size(); ++i) {
        raster[3 * i] = img.data[i].r;
        raster[3 * i + 1] = img.data[i].g;
        raster[3 * i + 2] = img.data[i].b;
    }
    detail::write_png(path, img.width, img.height, PNG_COLOR_TYPE_RGB, raster,
                      static_cast<size_t>(img.width) * 3);
}

}  // namespace lanekit
