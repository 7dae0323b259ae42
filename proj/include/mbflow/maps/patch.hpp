#pragma once

// Patch features and correlation costs. A feature is the 3x3 patch around a
// (possibly subpixel) point, sampled bilinearly at unit spacing and centered
// by subtracting the per-channel mean. Similarity is the Pearson correlation
// of two features, so costs live in [-1, 1].

#include <array>
#include <cmath>

#include "mbflow/core/sampling.hpp"
#include "mbflow/core/types.hpp"

namespace mbflow::maps {

struct PatchFeature {
    std::array<double, 27> values{};  // 9 per channel, channel-major
    int channels = 1;

    int size() const { return 9 * channels; }
};

inline PatchFeature patch_feature(const ImageBuffer& image, Point2 center) {
    PatchFeature f;
    f.channels = image.channels();
    int i = 0;
    std::array<std::array<double, 3>, 9> samples;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
            samples[i++] = bilinear_sample(image, {center.x + dx, center.y + dy});
    for (int c = 0; c < f.channels; ++c) {
        double mean = 0.0;
        for (int k = 0; k < 9; ++k) mean += samples[k][c];
        mean /= 9.0;
        for (int k = 0; k < 9; ++k) f.values[9 * c + k] = samples[k][c] - mean;
    }
    return f;
}

// Pearson correlation of two centered features. Zero-variance patches carry
// no matching evidence, so a vanishing norm yields 0 (neutral).
inline double similarity(const PatchFeature& fp, const PatchFeature& fq) {
    if (fp.size() != fq.size())
        throw std::invalid_argument("similarity: feature sizes differ");
    double dot = 0.0, np = 0.0, nq = 0.0;
    for (int i = 0; i < fp.size(); ++i) {
        dot += fp.values[i] * fq.values[i];
        np += fp.values[i] * fp.values[i];
        nq += fq.values[i] * fq.values[i];
    }
    np = std::sqrt(np);
    nq = std::sqrt(nq);
    if (np < 1e-12 || nq < 1e-12) return 0.0;
    return std::clamp(dot / (np * nq), -1.0, 1.0);
}

// Cost of matching point p in image_i to p + v in image_j.
inline double matching_cost(const ImageBuffer& image_i, const ImageBuffer& image_j, Point2 p,
                            Vec2 v) {
    return -similarity(patch_feature(image_i, p), patch_feature(image_j, {p.x + v.x, p.y + v.y}));
}

// The four side-point costs m_aa, m_ac, m_ca, m_cc.
struct CostQuad {
    double m_aa = 0.0;
    double m_ac = 0.0;
    double m_ca = 0.0;
    double m_cc = 0.0;
};

}  // namespace mbflow::maps
