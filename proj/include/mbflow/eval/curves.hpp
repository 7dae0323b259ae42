#pragma once

// Analysis curves: EPE stratified by distance to the nearest true motion
// boundary, the replacement error decomposition along boundary-normal rays,
// and the two-side EPE scatter pairs.

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "mbflow/core/distance_transform.hpp"
#include "mbflow/core/sampling.hpp"
#include "mbflow/eval/metrics.hpp"

namespace mbflow::eval {

struct DistanceCurve {
    struct Bin {
        int distance = 0;       // floor of the pixel distance; last bin collects the overflow
        double mean_epe = 0.0;
        size_t count = 0;
    };
    std::vector<Bin> bins;
};

inline DistanceCurve epe_vs_distance(const FlowField& est, const FlowField& gt,
                                     const BinaryMap& gt_mb, int max_dist) {
    require_same_size(est, gt, "epe_vs_distance");
    require_same_size(est, gt_mb, "epe_vs_distance");
    if (max_dist < 0) throw std::invalid_argument("epe_vs_distance: max_dist must be >= 0");
    ScalarMap err = epe_map(est, gt);
    ScalarMap dist = distance_transform(gt_mb);
    std::vector<double> sums(max_dist + 1, 0.0);
    std::vector<size_t> counts(max_dist + 1, 0);
    for (int y = 0; y < est.height(); ++y) {
        for (int x = 0; x < est.width(); ++x) {
            double e = err.at(x, y);
            if (std::isnan(e)) continue;
            double d = dist.at(x, y);
            int bin = std::isfinite(d) ? std::min(static_cast<int>(std::floor(d)), max_dist)
                                       : max_dist;
            sums[bin] += e;
            counts[bin] += 1;
        }
    }
    DistanceCurve curve;
    curve.bins.resize(max_dist + 1);
    for (int i = 0; i <= max_dist; ++i) {
        curve.bins[i].distance = i;
        curve.bins[i].count = counts[i];
        curve.bins[i].mean_epe = counts[i] ? sums[i] / counts[i] : 0.0;
    }
    return curve;
}

struct DecompositionCurve {
    struct Entry {
        int c = 0;        // offset along the ray, pixels
        double e = 0.0;   // estimation error ||Fhat(q) - F(q)||
        double a = 0.0;   // approximation error ||F(q) - F(p)||
        double r = 0.0;   // replacement error ||F(p) - Fhat(q)||
        size_t count = 0;
    };
    std::vector<Entry> entries;
};

namespace detail {

// True when some MB pixel other than `site` lies at distance <= sqrt(d2)
// from pt, i.e. pt is not strictly closer to its own boundary point than to
// every other one. Scans only the enclosing disc; exact, no approximate
// nearest-site lookup involved.
inline bool closer_mb_exists(const BinaryMap& mb, Point2 pt, double d2, int32_t site) {
    double radius = std::sqrt(d2);
    int x0 = std::max(0, static_cast<int>(std::floor(pt.x - radius)));
    int x1 = std::min(mb.width() - 1, static_cast<int>(std::ceil(pt.x + radius)));
    int y0 = std::max(0, static_cast<int>(std::floor(pt.y - radius)));
    int y1 = std::min(mb.height() - 1, static_cast<int>(std::ceil(pt.y + radius)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            if (!mb.at(x, y)) continue;
            if (y * mb.width() + x == site) continue;
            double dx = x - pt.x, dy = y - pt.y;
            if (dx * dx + dy * dy <= d2) return true;
        }
    }
    return false;
}

inline bool samples_valid(const FlowField& f, Point2 p) {
    if (!f.has_mask()) return true;
    auto t = mbflow::detail::bilinear_taps(f.width(), f.height(), p);
    return f.is_valid(t.x0, t.y0) && f.is_valid(t.x1, t.y0) && f.is_valid(t.x0, t.y1) &&
           f.is_valid(t.x1, t.y1);
}

}  // namespace detail

// Targets are pixels two pixels from their nearest MB point b; q walks away
// from the boundary along u = (p - b)/||p - b|| for c = 0..c_max, as long as
// every sample stays in frame and closer to b than to any other MB point.
inline DecompositionCurve error_decomposition(const FlowField& est, const FlowField& gt,
                                              const BinaryMap& gt_mb, int c_max = 20) {
    require_same_size(est, gt, "error_decomposition");
    require_same_size(est, gt_mb, "error_decomposition");
    auto dt = distance_transform_with_sites(gt_mb);

    std::vector<double> se(c_max + 1, 0.0), sa(c_max + 1, 0.0), sr(c_max + 1, 0.0);
    std::vector<size_t> counts(c_max + 1, 0);
    const int w = est.width(), h = est.height();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double d = dt.distance.at(x, y);
            if (!std::isfinite(d) || std::floor(d) != 2.0) continue;
            int32_t site = dt.nearest_site[static_cast<size_t>(y) * w + x];
            Point2 b{static_cast<double>(site % w), static_cast<double>(site / w)};
            Point2 p{static_cast<double>(x), static_cast<double>(y)};
            UnitVec2 u;
            if (!normalize(p - b, 1e-12, u)) continue;
            if (!detail::samples_valid(gt, p)) continue;
            Vec2 gt_p = bilinear_sample(gt, p);

            for (int c = 0; c <= c_max; ++c) {
                Point2 q = p + static_cast<double>(c) * u.vec();
                if (!in_frame(est, q)) break;
                Vec2 qb = q - b;
                if (detail::closer_mb_exists(gt_mb, q, qb.x * qb.x + qb.y * qb.y, site)) break;
                if (!detail::samples_valid(gt, q) || !detail::samples_valid(est, q)) break;
                Vec2 gt_q = bilinear_sample(gt, q);
                Vec2 est_q = bilinear_sample(est, q);
                se[c] += (est_q - gt_q).norm();
                sa[c] += (gt_q - gt_p).norm();
                sr[c] += (gt_p - est_q).norm();
                counts[c] += 1;
            }
        }
    }
    DecompositionCurve curve;
    curve.entries.resize(c_max + 1);
    for (int c = 0; c <= c_max; ++c) {
        auto& e = curve.entries[c];
        e.c = c;
        e.count = counts[c];
        if (counts[c]) {
            e.e = se[c] / counts[c];
            e.a = sa[c] / counts[c];
            e.r = sr[c] / counts[c];
        }
    }
    return curve;
}

namespace detail {

// Boundary normal from the MB map geometry: the tangent is the dominant
// principal direction of MB pixels in the 5x5 neighborhood, the normal its
// perpendicular. Degenerate neighborhoods (isotropic or singleton) give none.
inline std::optional<UnitVec2> mb_normal(const BinaryMap& mb, int bx, int by) {
    double sx = 0, sy = 0;
    int n = 0;
    for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) {
            int x = bx + dx, y = by + dy;
            if (x < 0 || y < 0 || x >= mb.width() || y >= mb.height()) continue;
            if (!mb.at(x, y)) continue;
            sx += x;
            sy += y;
            ++n;
        }
    }
    if (n < 2) return std::nullopt;
    double mx = sx / n, my = sy / n;
    double cxx = 0, cxy = 0, cyy = 0;
    for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) {
            int x = bx + dx, y = by + dy;
            if (x < 0 || y < 0 || x >= mb.width() || y >= mb.height()) continue;
            if (!mb.at(x, y)) continue;
            cxx += (x - mx) * (x - mx);
            cxy += (x - mx) * (y - my);
            cyy += (y - my) * (y - my);
        }
    }
    // dominant eigenvector of [[cxx, cxy], [cxy, cyy]]
    double tr = cxx + cyy;
    double det = cxx * cyy - cxy * cxy;
    double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    double l1 = tr / 2.0 + disc, l2 = tr / 2.0 - disc;
    if (l1 - l2 < 1e-9) return std::nullopt;  // isotropic: no preferred tangent
    Vec2 tangent = std::abs(cxy) > 1e-12 ? Vec2{l1 - cyy, cxy}
                                         : (cxx >= cyy ? Vec2{1, 0} : Vec2{0, 1});
    UnitVec2 t;
    if (!normalize(tangent, 1e-12, t)) return std::nullopt;
    return UnitVec2{-t.y, t.x};
}

}  // namespace detail

// EPE pairs at b +- sigma*n for every true-MB pixel with a usable normal,
// ordered so the smaller EPE comes first.
inline std::vector<std::pair<double, double>> side_epe_pairs(const FlowField& est,
                                                             const FlowField& gt,
                                                             const BinaryMap& gt_mb,
                                                             double sigma = 5.0) {
    require_same_size(est, gt, "side_epe_pairs");
    require_same_size(est, gt_mb, "side_epe_pairs");
    std::vector<std::pair<double, double>> pairs;
    for (int y = 0; y < gt_mb.height(); ++y) {
        for (int x = 0; x < gt_mb.width(); ++x) {
            if (!gt_mb.at(x, y)) continue;
            auto n = detail::mb_normal(gt_mb, x, y);
            if (!n) continue;
            Point2 b{static_cast<double>(x), static_cast<double>(y)};
            Point2 a = b + sigma * n->vec();
            Point2 c = b - sigma * n->vec();
            if (!in_frame(est, a) || !in_frame(est, c)) continue;
            if (!detail::samples_valid(gt, a) || !detail::samples_valid(gt, c) ||
                !detail::samples_valid(est, a) || !detail::samples_valid(est, c))
                continue;
            double ea = (bilinear_sample(est, a) - bilinear_sample(gt, a)).norm();
            double ec = (bilinear_sample(est, c) - bilinear_sample(gt, c)).norm();
            pairs.emplace_back(std::min(ea, ec), std::max(ea, ec));
        }
    }
    return pairs;
}

}  // namespace mbflow::eval
