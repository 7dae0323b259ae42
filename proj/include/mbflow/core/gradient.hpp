#pragma once

// Luminance conversion and the 3x3 Sobel brightness gradient. The Sobel
// response is normalized by 1/8 so a unit-slope ramp yields gradient
// magnitude 1 (intensity per pixel); borders use replicated padding.

#include "mbflow/core/types.hpp"

namespace mbflow {

// Rec.601 luminance; 1-channel images pass through unchanged.
inline ImageBuffer to_luminance(const ImageBuffer& img) {
    if (img.channels() == 1) return img;
    ImageBuffer out(img.width(), img.height(), 1);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            out.at(x, y) = 0.299f * img.at(x, y, 0) + 0.587f * img.at(x, y, 1) +
                           0.114f * img.at(x, y, 2);
    return out;
}

// Per-pixel (g_x, g_y) of a single-channel image, packed as a FlowField.
inline FlowField brightness_gradient(const ImageBuffer& gray) {
    if (gray.channels() != 1)
        throw std::invalid_argument("brightness_gradient: expects a 1-channel image");
    const int w = gray.width(), h = gray.height();
    FlowField grad(w, h);
    auto px = [&](int x, int y) {
        x = std::clamp(x, 0, w - 1);
        y = std::clamp(y, 0, h - 1);
        return static_cast<double>(gray.at(x, y));
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double gx = (px(x + 1, y - 1) - px(x - 1, y - 1)) +
                        2.0 * (px(x + 1, y) - px(x - 1, y)) +
                        (px(x + 1, y + 1) - px(x - 1, y + 1));
            double gy = (px(x - 1, y + 1) - px(x - 1, y - 1)) +
                        2.0 * (px(x, y + 1) - px(x, y - 1)) +
                        (px(x + 1, y + 1) - px(x + 1, y - 1));
            grad.set(x, y, {gx / 8.0, gy / 8.0});
        }
    }
    return grad;
}

}  // namespace mbflow
