#pragma once

// End-point error and tolerance-matched boundary precision/recall.
//
// Boundary matching: a predicted pixel is a true positive when it lies
// within r = rel_tol * image_diagonal of some ground-truth pixel; a
// ground-truth pixel is missed when no prediction lies within r of it.
// Matching is per side (not bipartite one-to-one), which keeps the measure
// symmetric: swapping pred and gt swaps precision and recall.

#include <cmath>

#include "mbflow/core/distance_transform.hpp"
#include "mbflow/core/types.hpp"

namespace mbflow::eval {

// Per-pixel ||est - gt||; pixels invalid in either field get NaN.
inline ScalarMap epe_map(const FlowField& est, const FlowField& gt) {
    require_same_size(est, gt, "epe_map");
    ScalarMap out(est.width(), est.height(), std::numeric_limits<double>::quiet_NaN());
    for (int y = 0; y < est.height(); ++y)
        for (int x = 0; x < est.width(); ++x)
            if (est.is_valid(x, y) && gt.is_valid(x, y))
                out.at(x, y) = (est.at(x, y) - gt.at(x, y)).norm();
    return out;
}

// Average end-point error over valid pixels.
inline double epe(const FlowField& est, const FlowField& gt) {
    ScalarMap m = epe_map(est, gt);
    double sum = 0.0;
    size_t count = 0;
    for (double v : m.data()) {
        if (std::isnan(v)) continue;
        sum += v;
        ++count;
    }
    if (count == 0) throw std::invalid_argument("epe: no valid pixel");
    return sum / static_cast<double>(count);
}

struct PRStats {
    size_t tp = 0;  // predicted pixels within tolerance of gt
    size_t fp = 0;  // predicted pixels without a nearby gt pixel
    size_t fn = 0;  // gt pixels without a nearby prediction
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

inline PRStats boundary_f1(const BinaryMap& pred, const BinaryMap& gt, double rel_tol = 0.0075) {
    require_same_size(pred, gt, "boundary_f1");
    const double w = pred.width(), h = pred.height();
    const double radius = rel_tol * std::sqrt(w * w + h * h);

    ScalarMap dist_gt = distance_transform(gt);
    ScalarMap dist_pred = distance_transform(pred);

    PRStats s;
    size_t gt_total = 0, gt_matched = 0;
    for (int y = 0; y < pred.height(); ++y) {
        for (int x = 0; x < pred.width(); ++x) {
            if (pred.at(x, y)) {
                if (dist_gt.at(x, y) <= radius)
                    ++s.tp;
                else
                    ++s.fp;
            }
            if (gt.at(x, y)) {
                ++gt_total;
                if (dist_pred.at(x, y) <= radius)
                    ++gt_matched;
                else
                    ++s.fn;
            }
        }
    }
    if (s.tp + s.fp > 0) s.precision = static_cast<double>(s.tp) / (s.tp + s.fp);
    if (gt_total > 0) s.recall = static_cast<double>(gt_matched) / gt_total;
    if (s.precision + s.recall > 0.0)
        s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

}  // namespace mbflow::eval
