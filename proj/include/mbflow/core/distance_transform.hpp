#pragma once

// Exact Euclidean distance transform, two-pass lower-envelope algorithm on
// squared distances. Pass 1 finds, per column, the nearest true pixel in
// that column (two linear sweeps). Pass 2 runs the 1D parabola envelope
// along each row. Squared distances are integers, representable exactly in
// double, so the result matches a brute-force nearest-true-pixel search
// bit for bit. An all-false mask yields +infinity everywhere.
//
// The envelope pass also tracks which parabola wins, so the transform can
// report the nearest true pixel itself (linear index, -1 when none).

#include <cstdint>
#include <vector>

#include "mbflow/core/types.hpp"

namespace mbflow {

struct DistanceTransformResult {
    ScalarMap distance;                 // Euclidean pixel distance
    std::vector<int32_t> nearest_site;  // row-major index of the closest true pixel, -1 if none
};

inline DistanceTransformResult distance_transform_with_sites(const BinaryMap& mask) {
    const int w = mask.width(), h = mask.height();
    const double INF = ScalarMap::infinity();
    const size_t n = static_cast<size_t>(w) * h;

    // column sweep: squared vertical distance to the nearest true pixel in the same column
    std::vector<double> col_d2(n, INF);
    std::vector<int32_t> col_site(n, -1);
    for (int x = 0; x < w; ++x) {
        int last = -1;
        for (int y = 0; y < h; ++y) {
            if (mask.at(x, y)) last = y;
            if (last >= 0) {
                double dy = y - last;
                col_d2[static_cast<size_t>(y) * w + x] = dy * dy;
                col_site[static_cast<size_t>(y) * w + x] = last * w + x;
            }
        }
        last = -1;
        for (int y = h - 1; y >= 0; --y) {
            if (mask.at(x, y)) last = y;
            if (last >= 0) {
                double dy = last - y;
                size_t i = static_cast<size_t>(y) * w + x;
                if (dy * dy < col_d2[i]) {
                    col_d2[i] = dy * dy;
                    col_site[i] = last * w + x;
                }
            }
        }
    }

    DistanceTransformResult res{ScalarMap(w, h, INF), std::vector<int32_t>(n, -1)};
    std::vector<int> v(w);        // parabola roots
    std::vector<double> z(w + 1); // envelope breakpoints
    for (int y = 0; y < h; ++y) {
        const double* f = &col_d2[static_cast<size_t>(y) * w];
        int k = -1;
        for (int q = 0; q < w; ++q) {
            if (f[q] == INF) continue;
            if (k < 0) {
                k = 0;
                v[0] = q;
                z[0] = -INF;
                z[1] = INF;
                continue;
            }
            double s;
            while (true) {
                int p = v[k];
                s = (f[q] + static_cast<double>(q) * q - f[p] - static_cast<double>(p) * p) /
                    (2.0 * (q - p));
                if (s <= z[k] && k > 0) {
                    --k;
                } else {
                    break;
                }
            }
            if (s <= z[k]) {  // k == 0 and the new parabola dominates everywhere
                v[0] = q;
                z[0] = -INF;
                z[1] = INF;
            } else {
                ++k;
                v[k] = q;
                z[k] = s;
                z[k + 1] = INF;
            }
        }
        if (k < 0) continue;  // no site reaches this row
        int j = 0;
        for (int q = 0; q < w; ++q) {
            while (z[j + 1] < q) ++j;
            double dx = q - v[j];
            size_t i = static_cast<size_t>(y) * w + q;
            res.distance.at(q, y) = std::sqrt(f[v[j]] + dx * dx);
            res.nearest_site[i] = col_site[static_cast<size_t>(y) * w + v[j]];
        }
    }
    return res;
}

// Euclidean pixel distance to the nearest true pixel.
inline ScalarMap distance_transform(const BinaryMap& mask) {
    return distance_transform_with_sites(mask).distance;
}

}  // namespace mbflow
