#pragma once

// Seeded synthetic scenes with exact ground truth: a static textured
// background and an independently textured foreground rectangle translating
// by a fixed displacement per frame (frame 1 uses the negated displacement).
// The "estimated" flow is the ground truth degraded two ways: a Gaussian
// blur (oversmoothing across the boundary) and, optionally, a band of
// background pixels near the boundary overwritten with the foreground
// displacement (one-sided corruption, the shape real estimators produce on
// the occluded side).
//
// Textures are a constant per-channel base color plus i.i.d. uniform noise;
// the base-color step across the boundary is what image edge detectors key
// on, the noise is what patch correlation keys on. Noise comes from mt19937
// through an explicit uint->float map, so scenes are platform-deterministic.

#include <random>

#include "mbflow/core/distance_transform.hpp"
#include "mbflow/core/sampling.hpp"
#include "mbflow/core/types.hpp"

namespace mbflow::eval {

struct SynthSceneSpec {
    int width = 128;
    int height = 128;
    int fg_x = 40, fg_y = 40, fg_w = 48, fg_h = 48;  // foreground rectangle in frame 2
    double dx = 8.0, dy = 0.0;                       // displacement, pixels/frame
    uint32_t texture_seed = 1;
    double estimate_blur_sigma = 2.0;
    int corruption_band = 3;  // pixels; 0 disables the one-sided corruption
};

struct SynthScene {
    ImageBuffer I1, I2, I3;
    FlowField gt_flow;
    BinaryMap gt_mb;
    FlowField est_flow;
};

namespace detail {

inline float noise_unit(std::mt19937& rng) {
    // top 24 bits -> [0, 1); avoids distribution implementation differences
    return (rng() >> 8) * (1.0f / 16777216.0f);
}

inline FlowField gaussian_blur(const FlowField& f, double sigma) {
    if (sigma <= 0.0) return f;
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        kernel[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
        sum += kernel[k + radius];
    }
    for (double& k : kernel) k /= sum;

    const int w = f.width(), h = f.height();
    auto clampi = [](int v, int lo, int hi) { return std::clamp(v, lo, hi); };
    FlowField tmp(w, h), out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            Vec2 acc{0, 0};
            for (int k = -radius; k <= radius; ++k)
                acc = acc + kernel[k + radius] * f.at(clampi(x + k, 0, w - 1), y);
            tmp.set(x, y, acc);
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            Vec2 acc{0, 0};
            for (int k = -radius; k <= radius; ++k)
                acc = acc + kernel[k + radius] * tmp.at(x, clampi(y + k, 0, h - 1));
            out.set(x, y, acc);
        }
    }
    return out;
}

}  // namespace detail

inline SynthScene synth_scene(const SynthSceneSpec& spec) {
    const int w = spec.width, h = spec.height;
    if (w <= 0 || h <= 0) throw std::invalid_argument("synth_scene: bad frame size");
    if (spec.fg_w <= 0 || spec.fg_h <= 0 || spec.fg_x < 0 || spec.fg_y < 0 ||
        spec.fg_x + spec.fg_w > w || spec.fg_y + spec.fg_h > h)
        throw std::invalid_argument("synth_scene: foreground rectangle outside the frame");
    if (spec.estimate_blur_sigma < 0.0)
        throw std::invalid_argument("synth_scene: negative blur sigma");
    for (int k : {-1, 1}) {
        double x0 = spec.fg_x + k * spec.dx, y0 = spec.fg_y + k * spec.dy;
        if (x0 < 0 || y0 < 0 || x0 + spec.fg_w > w || y0 + spec.fg_h > h)
            throw std::invalid_argument(
                "synth_scene: foreground rectangle leaves the frame in frame " +
                std::string(k < 0 ? "1" : "3"));
    }

    constexpr float kBgBase[3] = {0.25f, 0.35f, 0.45f};
    constexpr float kFgBase[3] = {0.75f, 0.65f, 0.55f};
    constexpr float kNoiseAmp = 0.08f;

    std::mt19937 bg_rng(spec.texture_seed);
    std::mt19937 fg_rng(spec.texture_seed ^ 0x9e3779b9u);

    ImageBuffer bg_tex(w, h, 3);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                bg_tex.at(x, y, c) =
                    kBgBase[c] + kNoiseAmp * (2.0f * detail::noise_unit(bg_rng) - 1.0f);

    ImageBuffer fg_tex(spec.fg_w, spec.fg_h, 3);
    for (int y = 0; y < spec.fg_h; ++y)
        for (int x = 0; x < spec.fg_w; ++x)
            for (int c = 0; c < 3; ++c)
                fg_tex.at(x, y, c) =
                    kFgBase[c] + kNoiseAmp * (2.0f * detail::noise_unit(fg_rng) - 1.0f);

    // The silhouette ring is rendered antialiased: the border pixel blends
    // half foreground, half background, like a real object edge imaged by a
    // pixel that straddles it. Interior pixels are pure foreground.
    auto render = [&](int frame_offset) {
        ImageBuffer img = bg_tex;
        double ox = spec.fg_x + frame_offset * spec.dx;
        double oy = spec.fg_y + frame_offset * spec.dy;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double tx = x - ox, ty = y - oy;
                if (tx < 0 || ty < 0 || tx > spec.fg_w - 1 || ty > spec.fg_h - 1) continue;
                double edge = std::min(std::min(tx, spec.fg_w - 1 - tx),
                                       std::min(ty, spec.fg_h - 1 - ty));
                double alpha = std::min(1.0, 0.5 + edge);
                auto s = bilinear_sample(fg_tex, {tx, ty});
                for (int c = 0; c < 3; ++c)
                    img.at(x, y, c) =
                        static_cast<float>(alpha * s[c] + (1.0 - alpha) * img.at(x, y, c));
            }
        }
        return img;
    };

    SynthScene scene;
    scene.I1 = render(-1);
    scene.I2 = render(0);
    scene.I3 = render(1);

    auto in_fg = [&](int x, int y) {
        return x >= spec.fg_x && x < spec.fg_x + spec.fg_w && y >= spec.fg_y &&
               y < spec.fg_y + spec.fg_h;
    };

    scene.gt_flow = FlowField(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (in_fg(x, y)) scene.gt_flow.set(x, y, {spec.dx, spec.dy});

    // boundary: pixels of either region 4-adjacent to the other
    scene.gt_mb = BinaryMap(w, h);
    const int nx[4] = {1, -1, 0, 0}, ny[4] = {0, 0, 1, -1};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool self = in_fg(x, y);
            for (int k = 0; k < 4; ++k) {
                int ax = x + nx[k], ay = y + ny[k];
                if (ax < 0 || ay < 0 || ax >= w || ay >= h) continue;
                if (in_fg(ax, ay) != self) {
                    scene.gt_mb.set(x, y, true);
                    break;
                }
            }
        }
    }

    scene.est_flow = detail::gaussian_blur(scene.gt_flow, spec.estimate_blur_sigma);
    if (spec.corruption_band > 0) {
        ScalarMap dist = distance_transform(scene.gt_mb);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (!in_fg(x, y) && dist.at(x, y) <= spec.corruption_band)
                    scene.est_flow.set(x, y, {spec.dx, spec.dy});
    }
    return scene;
}

}  // namespace mbflow::eval
