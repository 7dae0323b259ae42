#pragma once

// Image edge map. Built-in mode is a classical Canny-style detector:
// Sobel gradient magnitude, 8-direction non-maximum suppression, then
// hysteresis with (low, high). External mode ingests any grayscale edge
// probability map and thresholds it at 0.5.

#include "mbflow/core/gradient.hpp"
#include "mbflow/detect/hysteresis.hpp"

namespace mbflow::maps {

inline BinaryMap edge_map(const ImageBuffer& image, double low, double high) {
    if (!(low >= 0.0) || !(high >= low))
        throw std::invalid_argument("edge_map: requires 0 <= low <= high");
    const ImageBuffer gray = to_luminance(image);
    const FlowField grad = brightness_gradient(gray);
    const int w = gray.width(), h = gray.height();

    ScalarMap mag(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) mag.at(x, y) = grad.at(x, y).norm();

    // non-maximum suppression along the quantized gradient direction;
    // (>= back, > front) keeps exactly one pixel on symmetric steps
    auto mag_at = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
        return mag.at(x, y);
    };
    BinaryMap nms(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double m = mag.at(x, y);
            if (m <= 0.0) continue;
            Vec2 g = grad.at(x, y);
            // quantize the gradient direction into 4 sectors (mod 180 deg)
            double ax = std::abs(g.x), ay = std::abs(g.y);
            int dx, dy;
            const double tan22 = 0.4142135623730951;  // tan(22.5 deg)
            if (ay <= ax * tan22) {
                dx = 1; dy = 0;
            } else if (ax <= ay * tan22) {
                dx = 0; dy = 1;
            } else if ((g.x > 0) == (g.y > 0)) {
                dx = 1; dy = 1;
            } else {
                dx = 1; dy = -1;
            }
            if (m >= mag_at(x - dx, y - dy) && m > mag_at(x + dx, y + dy)) nms.set(x, y, true);
        }
    }

    BinaryMap strong(w, h), weak(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!nms.at(x, y)) continue;
            double m = mag.at(x, y);
            if (m >= high)
                strong.set(x, y, true);
            else if (m >= low)
                weak.set(x, y, true);
        }
    }
    return detect::promote_weak(strong, weak);
}

// External edge map: grayscale values in [0,1], >= 0.5 means edge.
inline BinaryMap external_edge_map(const ImageBuffer& map) {
    const ImageBuffer gray = to_luminance(map);
    BinaryMap out(gray.width(), gray.height());
    for (size_t i = 0; i < gray.data().size(); ++i) out.data()[i] = gray.data()[i] >= 0.5f;
    return out;
}

}  // namespace mbflow::maps
