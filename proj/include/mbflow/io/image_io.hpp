#pragma once

// Image and binary-map files. 8-bit PNG/PPM images scale to [0,1] by /255;
// binary maps are 8-bit grayscale PNG with 0 <-> false and 255 <-> true
// (values >= 128 read back as true, so externally produced maps work too).

#include <cctype>
#include <filesystem>
#include <fstream>
#include <string>

#include "mbflow/io/png_io.hpp"

namespace mbflow::io {

namespace detail {

inline int ppm_next_int(std::istream& in) {
    // skips whitespace and '#' comments per the netpbm grammar
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
        } else if (!std::isspace(c)) {
            break;
        }
    }
    if (c == EOF) throw FormatError("PPM: truncated header");
    int value = 0;
    bool any = false;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        any = true;
        c = in.get();
    }
    if (!any) throw FormatError("PPM: malformed header");
    return value;
}

inline ImageBuffer read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open file: " + path.string());
    char m0 = static_cast<char>(in.get());
    char m1 = static_cast<char>(in.get());
    if (m0 != 'P' || (m1 != '5' && m1 != '6')) throw FormatError("PPM: bad magic");
    const int channels = (m1 == '6') ? 3 : 1;
    int w = ppm_next_int(in);
    int h = ppm_next_int(in);
    int maxval = ppm_next_int(in);
    if (w <= 0 || h <= 0) throw FormatError("PPM: bad dimensions");
    if (maxval != 255) throw FormatError("PPM: only maxval 255 supported");
    ImageBuffer img(w, h, channels);
    std::vector<unsigned char> raw(static_cast<size_t>(w) * h * channels);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<size_t>(in.gcount()) != raw.size()) throw FormatError("PPM: truncated data");
    for (size_t i = 0; i < raw.size(); ++i) img.data()[i] = raw[i] / 255.0f;
    return img;
}

}  // namespace detail

// Reads an 8-bit PNG or PPM image into [0,1].
inline ImageBuffer read_image(const std::filesystem::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw FormatError("cannot open file: " + path.string());
    unsigned char sig[2] = {0, 0};
    probe.read(reinterpret_cast<char*>(sig), 2);
    probe.close();
    if (sig[0] == 'P' && (sig[1] == '5' || sig[1] == '6')) return detail::read_ppm(path);

    PngImage png = read_png(path);
    if (png.bit_depth != 8)
        throw FormatError("read_image: expected an 8-bit image: " + path.string());
    ImageBuffer img(png.width, png.height, png.channels);
    for (size_t i = 0; i < png.pixels.size(); ++i) img.data()[i] = png.pixels[i] / 255.0f;
    return img;
}

// Writes an image as 8-bit PNG (values clamped to [0,1], rounded to /255 steps).
inline void write_image(const ImageBuffer& img, const std::filesystem::path& path) {
    PngImage png;
    png.width = img.width();
    png.height = img.height();
    png.channels = img.channels();
    png.bit_depth = 8;
    png.pixels.resize(img.data().size());
    for (size_t i = 0; i < img.data().size(); ++i) {
        float v = std::clamp(img.data()[i], 0.0f, 1.0f);
        png.pixels[i] = static_cast<uint16_t>(std::lround(v * 255.0f));
    }
    write_png(png, path);
}

inline void write_binary_map(const BinaryMap& map, const std::filesystem::path& path) {
    PngImage png;
    png.width = map.width();
    png.height = map.height();
    png.channels = 1;
    png.bit_depth = 8;
    png.pixels.resize(map.data().size());
    for (size_t i = 0; i < map.data().size(); ++i) png.pixels[i] = map.data()[i] ? 255 : 0;
    write_png(png, path);
}

inline BinaryMap read_binary_map(const std::filesystem::path& path) {
    PngImage png = read_png(path);
    if (png.channels != 1 || png.bit_depth != 8)
        throw FormatError("binary map: expected 8-bit grayscale PNG: " + path.string());
    BinaryMap map(png.width, png.height);
    for (size_t i = 0; i < png.pixels.size(); ++i) map.data()[i] = png.pixels[i] >= 128 ? 1 : 0;
    return map;
}

}  // namespace mbflow::io
