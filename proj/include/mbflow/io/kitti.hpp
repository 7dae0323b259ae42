#pragma once

// KITTI flow maps: 16-bit 3-channel PNG with
//   u = (ch1 - 2^15) / 64,  v = (ch2 - 2^15) / 64,  valid = ch3 > 0.
// Invalid pixels decode to (0,0). Encoding saturates to the representable
// range instead of wrapping.

#include <filesystem>

#include "mbflow/io/png_io.hpp"

namespace mbflow::io {

inline FlowField read_kitti_flow(const std::filesystem::path& path) {
    PngImage png = read_png(path);
    if (png.bit_depth != 16 || png.channels != 3)
        throw FormatError("KITTI flow: expected a 16-bit 3-channel PNG: " + path.string());
    FlowField field(png.width, png.height);
    for (int y = 0; y < png.height; ++y) {
        for (int x = 0; x < png.width; ++x) {
            bool valid = png.at(x, y, 2) > 0;
            field.set_valid(x, y, valid);
            if (valid)
                field.set(x, y, {(png.at(x, y, 0) - 32768.0) / 64.0,
                                 (png.at(x, y, 1) - 32768.0) / 64.0});
        }
    }
    return field;
}

inline void write_kitti_flow(const FlowField& field, const std::filesystem::path& path) {
    PngImage png;
    png.width = field.width();
    png.height = field.height();
    png.channels = 3;
    png.bit_depth = 16;
    png.pixels.assign(static_cast<size_t>(png.width) * png.height * 3, 0);
    auto encode = [](double value) {
        double coded = std::round(value * 64.0) + 32768.0;
        return static_cast<uint16_t>(std::clamp(coded, 0.0, 65535.0));
    };
    for (int y = 0; y < png.height; ++y) {
        for (int x = 0; x < png.width; ++x) {
            if (!field.is_valid(x, y)) {
                png.at(x, y, 0) = 32768;
                png.at(x, y, 1) = 32768;
                png.at(x, y, 2) = 0;
                continue;
            }
            Vec2 f = field.at(x, y);
            png.at(x, y, 0) = encode(f.x);
            png.at(x, y, 1) = encode(f.y);
            png.at(x, y, 2) = 1;
        }
    }
    write_png(png, path);
}

}  // namespace mbflow::io
