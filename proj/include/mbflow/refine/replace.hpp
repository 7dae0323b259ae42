#pragma once

// Flow replacement near detected boundaries.
//
// For a boundary pixel b with unit normal u (brightness-gradient direction),
// the smallest safe distance along the ray b + d*u is the first integer d
// where flow stops changing rapidly relative to the change accumulated
// since d = 1:
//
//   d* = min{ d : ||f(d) - f(d+1)|| / ||f(1) - f(d)|| < tau }
//
// 0/0 qualifies (the flow is already constant); denominator 0 with a nonzero
// numerator does not. With first safe points q = b + d*.u and q' on the
// opposite side, pixels strictly between b and q are rewritten with the flow
// at q when q is the smaller-motion side and the flow differs enough across
// the boundary:  ||F(q)|| < ||F(q')||  and  ||F(q) - F(q')|| >= alpha*||F(q)||.

#include <cstdint>
#include <optional>
#include <vector>

#include "mbflow/core/gradient.hpp"
#include "mbflow/core/parallel.hpp"
#include "mbflow/core/sampling.hpp"

namespace mbflow::refine {

struct RefineParams {
    double tau = 0.2;        // safe-distance saturation threshold, in (0,1)
    double alpha = 0.2;      // cross-boundary flow difference factor
    int d_max = 20;          // safe-distance scan cap, pixels
    double grad_eps = 1e-6;  // minimum gradient magnitude for a usable normal
};

struct ReplacementAssignment {
    Point2 b;        // boundary point
    UnitVec2 u;      // normal, pointing to the replacement side
    int d_star = 0;  // safe distance along u, pixels
    Point2 p;        // target, p = b + d.u with 0 < d < d_star
    Point2 q;        // source, q = b + d_star.u
    Vec2 replacement_flow;  // flow sampled at q
};

// Normal from a precomputed brightness-gradient field (sampled bilinearly
// at b); empty when the gradient magnitude is below grad_eps.
inline std::optional<UnitVec2> boundary_normal(const FlowField& gradient, Point2 b,
                                               double grad_eps) {
    UnitVec2 u;
    if (!normalize(bilinear_sample(gradient, b), grad_eps, u)) return std::nullopt;
    return u;
}

inline std::optional<UnitVec2> boundary_normal(const ImageBuffer& I2, Point2 b, double grad_eps) {
    return boundary_normal(brightness_gradient(to_luminance(I2)), b, grad_eps);
}

inline std::optional<int> safe_distance(const FlowField& flow, Point2 b, UnitVec2 u,
                                        const RefineParams& params) {
    constexpr double kZero = 1e-9;
    if (!in_frame(flow, b + 1.0 * u.vec())) return std::nullopt;
    Vec2 f1 = bilinear_sample(flow, b + 1.0 * u.vec());
    Vec2 fd = f1;
    for (int d = 1; d <= params.d_max; ++d) {
        Point2 next = b + static_cast<double>(d + 1) * u.vec();
        if (!in_frame(flow, next)) return std::nullopt;  // segment b..(d+1)u leaves the frame
        Vec2 fd1 = bilinear_sample(flow, next);
        double num = (fd - fd1).norm();
        double den = (f1 - fd).norm();
        if (num < kZero && den < kZero) return d;
        if (den >= kZero && num / den < params.tau) return d;
        fd = fd1;
    }
    return std::nullopt;
}

// All replacement assignments induced by the boundary map. Boundary pixels
// are visited in row-major order and each contributes its candidates
// contiguously, so the output order is deterministic.
inline std::vector<ReplacementAssignment> replacement_set(const FlowField& flow,
                                                          const BinaryMap& boundaries,
                                                          const ImageBuffer& I2,
                                                          const RefineParams& params,
                                                          unsigned jobs = 1) {
    require_same_size(flow, boundaries, "replacement_set");
    require_same_size(flow, I2, "replacement_set");
    const FlowField grad = brightness_gradient(to_luminance(I2));
    const int w = flow.width(), h = flow.height();

    std::vector<std::vector<ReplacementAssignment>> per_row(h);
    parallel_for_rows(0, h, jobs, [&](int y) {
        for (int x = 0; x < w; ++x) {
            if (!boundaries.at(x, y)) continue;
            Point2 b{static_cast<double>(x), static_cast<double>(y)};
            auto normal = boundary_normal(grad, b, params.grad_eps);
            if (!normal) continue;
            UnitVec2 u = *normal;

            auto d_plus = safe_distance(flow, b, u, params);
            auto d_minus = safe_distance(flow, b, u.flipped(), params);
            if (!d_plus || !d_minus) continue;

            Point2 q_plus = b + static_cast<double>(*d_plus) * u.vec();
            Point2 q_minus = b - static_cast<double>(*d_minus) * u.vec();
            Vec2 f_plus = bilinear_sample(flow, q_plus);
            Vec2 f_minus = bilinear_sample(flow, q_minus);

            int d_star;
            Point2 q, q_other;
            Vec2 f_q, f_other;
            if (f_plus.norm() < f_minus.norm()) {
                d_star = *d_plus;
                q = q_plus; q_other = q_minus;
                f_q = f_plus; f_other = f_minus;
            } else if (f_minus.norm() < f_plus.norm()) {
                u = u.flipped();
                d_star = *d_minus;
                q = q_minus; q_other = q_plus;
                f_q = f_minus; f_other = f_plus;
            } else {
                continue;  // equal magnitudes: no smaller-motion side
            }
            if ((f_q - f_other).norm() < params.alpha * f_q.norm()) continue;

            for (int d = 1; d < d_star; ++d) {
                ReplacementAssignment a;
                a.b = b;
                a.u = u;
                a.d_star = d_star;
                a.p = b + static_cast<double>(d) * u.vec();
                a.q = q;
                a.replacement_flow = f_q;
                per_row[y].push_back(a);
            }
        }
    });

    std::vector<ReplacementAssignment> all;
    for (auto& row : per_row) all.insert(all.end(), row.begin(), row.end());
    return all;
}

// Applies assignments to a copy of the flow. Targets are the integer pixels
// nearest to p; when several assignments hit one pixel, the one whose
// boundary point is closest wins (ties: smaller row-major index of b).
inline FlowField refine_flow(const FlowField& flow,
                             const std::vector<ReplacementAssignment>& assignments) {
    FlowField out = flow;
    const int w = flow.width(), h = flow.height();
    struct Claim {
        double dist2;
        int64_t b_index;
    };
    std::vector<std::optional<Claim>> claims(static_cast<size_t>(w) * h);
    for (const auto& a : assignments) {
        int tx = static_cast<int>(std::lround(a.p.x));
        int ty = static_cast<int>(std::lround(a.p.y));
        if (tx < 0 || ty < 0 || tx >= w || ty >= h) continue;
        double dx = a.b.x - tx, dy = a.b.y - ty;
        Claim c{dx * dx + dy * dy,
                static_cast<int64_t>(std::lround(a.b.y)) * w +
                    static_cast<int64_t>(std::lround(a.b.x))};
        size_t idx = static_cast<size_t>(ty) * w + tx;
        auto& slot = claims[idx];
        if (!slot || c.dist2 < slot->dist2 ||
            (c.dist2 == slot->dist2 && c.b_index < slot->b_index)) {
            slot = c;
            out.set(tx, ty, a.replacement_flow);
        }
    }
    return out;
}

}  // namespace mbflow::refine
