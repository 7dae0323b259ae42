#pragma once

// Thin libpng wrapper: 8- or 16-bit, gray or RGB, no interlacing surprises.
// 16-bit samples cross the API in host order; the PNG byte stream itself is
// big-endian and assembled explicitly so the codec is endian-safe.

#include <csetjmp>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <vector>

#include <png.h>

#include "mbflow/core/types.hpp"

namespace mbflow::io {

struct PngImage {
    int width = 0;
    int height = 0;
    int channels = 1;   // 1 or 3
    int bit_depth = 8;  // 8 or 16
    std::vector<uint16_t> pixels;  // row-major, channel-interleaved

    uint16_t at(int x, int y, int c = 0) const {
        return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    uint16_t& at(int x, int y, int c = 0) {
        return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
    }
};

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace detail

inline PngImage read_png(const std::filesystem::path& path) {
    detail::FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw FormatError("cannot open file: " + path.string());

    unsigned char sig[8];
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8))
        throw FormatError("not a PNG file: " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw FormatError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw FormatError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("malformed PNG: " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int depth = png_get_bit_depth(png, info);
    int color = png_get_color_type(png, info);

    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    depth = png_get_bit_depth(png, info);
    int chans = png_get_channels(png, info);
    if ((depth != 8 && depth != 16) || (chans != 1 && chans != 3)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("unsupported PNG layout (depth " + std::to_string(depth) + ", " +
                          std::to_string(chans) + " channels): " + path.string());
    }

    PngImage img;
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.channels = chans;
    img.bit_depth = depth;
    img.pixels.resize(static_cast<size_t>(w) * h * chans);

    const size_t row_bytes = static_cast<size_t>(w) * chans * (depth / 8);
    std::vector<unsigned char> row(row_bytes);
    for (png_uint_32 y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        uint16_t* dst = &img.pixels[static_cast<size_t>(y) * w * chans];
        if (depth == 8) {
            for (size_t i = 0; i < static_cast<size_t>(w) * chans; ++i) dst[i] = row[i];
        } else {
            for (size_t i = 0; i < static_cast<size_t>(w) * chans; ++i)
                dst[i] = static_cast<uint16_t>(row[2 * i] << 8 | row[2 * i + 1]);
        }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

inline void write_png(const PngImage& img, const std::filesystem::path& path) {
    if (img.width <= 0 || img.height <= 0)
        throw std::invalid_argument("write_png: empty image");
    if ((img.bit_depth != 8 && img.bit_depth != 16) || (img.channels != 1 && img.channels != 3))
        throw std::invalid_argument("write_png: unsupported layout");

    detail::FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw FormatError("cannot open file for writing: " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw FormatError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw FormatError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw FormatError("PNG write failed: " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), img.bit_depth,
                 img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const size_t samples = static_cast<size_t>(img.width) * img.channels;
    std::vector<unsigned char> row(samples * (img.bit_depth / 8));
    for (int y = 0; y < img.height; ++y) {
        const uint16_t* src = &img.pixels[static_cast<size_t>(y) * samples];
        if (img.bit_depth == 8) {
            for (size_t i = 0; i < samples; ++i) row[i] = static_cast<unsigned char>(src[i]);
        } else {
            for (size_t i = 0; i < samples; ++i) {
                row[2 * i] = static_cast<unsigned char>(src[i] >> 8);
                row[2 * i + 1] = static_cast<unsigned char>(src[i]);
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace mbflow::io
