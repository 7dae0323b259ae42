#pragma once

// Bilinear sampling at subpixel positions. Coordinates outside
// [0, w-1] x [0, h-1] are clamped to the border before interpolation, so
// every finite query is answerable.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "mbflow/core/types.hpp"

namespace mbflow {

namespace detail {

struct BilinearTaps {
    int x0, y0, x1, y1;
    double wx, wy;  // weight of the x1 / y1 tap
};

inline BilinearTaps bilinear_taps(int width, int height, Point2 p) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw std::invalid_argument("bilinear_sample: non-finite coordinates");
    double cx = std::clamp(p.x, 0.0, static_cast<double>(width - 1));
    double cy = std::clamp(p.y, 0.0, static_cast<double>(height - 1));
    BilinearTaps t;
    t.x0 = static_cast<int>(std::floor(cx));
    t.y0 = static_cast<int>(std::floor(cy));
    t.x1 = std::min(t.x0 + 1, width - 1);
    t.y1 = std::min(t.y0 + 1, height - 1);
    t.wx = cx - t.x0;
    t.wy = cy - t.y0;
    return t;
}

}  // namespace detail

inline bool in_frame(int width, int height, Point2 p) {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= width - 1 && p.y <= height - 1;
}

template <class Field>
inline bool in_frame(const Field& f, Point2 p) {
    return in_frame(f.width(), f.height(), p);
}

inline Vec2 bilinear_sample(const FlowField& f, Point2 p) {
    auto t = detail::bilinear_taps(f.width(), f.height(), p);
    double w00 = (1 - t.wx) * (1 - t.wy), w10 = t.wx * (1 - t.wy);
    double w01 = (1 - t.wx) * t.wy, w11 = t.wx * t.wy;
    return {w00 * f.u(t.x0, t.y0) + w10 * f.u(t.x1, t.y0) + w01 * f.u(t.x0, t.y1) +
                w11 * f.u(t.x1, t.y1),
            w00 * f.v(t.x0, t.y0) + w10 * f.v(t.x1, t.y0) + w01 * f.v(t.x0, t.y1) +
                w11 * f.v(t.x1, t.y1)};
}

// Per-channel sample; entries past img.channels() are zero.
inline std::array<double, 3> bilinear_sample(const ImageBuffer& img, Point2 p) {
    auto t = detail::bilinear_taps(img.width(), img.height(), p);
    double w00 = (1 - t.wx) * (1 - t.wy), w10 = t.wx * (1 - t.wy);
    double w01 = (1 - t.wx) * t.wy, w11 = t.wx * t.wy;
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int c = 0; c < img.channels(); ++c)
        out[c] = w00 * img.at(t.x0, t.y0, c) + w10 * img.at(t.x1, t.y0, c) +
                 w01 * img.at(t.x0, t.y1, c) + w11 * img.at(t.x1, t.y1, c);
    return out;
}

inline double bilinear_sample(const ScalarMap& m, Point2 p) {
    auto t = detail::bilinear_taps(m.width(), m.height(), p);
    return (1 - t.wx) * (1 - t.wy) * m.at(t.x0, t.y0) + t.wx * (1 - t.wy) * m.at(t.x1, t.y0) +
           (1 - t.wx) * t.wy * m.at(t.x0, t.y1) + t.wx * t.wy * m.at(t.x1, t.y1);
}

}  // namespace mbflow
