#pragma once

// Invalid-smooth-motion map. For a candidate boundary pixel b with unit
// brightness-gradient direction u, the side points a = b + sigma*u and
// c = b - sigma*u are matched under each other's flow. A pixel is flagged
// when one side's motion matches its own patch well but fails the other
// side's patch:
//
//   M_ism(b) = max{ m_ac - m_cc, m_ca - m_aa } > theta_ism
//
// Costs take the better of forward and backward motion when frame 1 and the
// backward flow are available; an occluding boundary forward in time is a
// dis-occluding one in reverse, where flow estimates tend to be better.

#include <optional>

#include "mbflow/core/gradient.hpp"
#include "mbflow/core/parallel.hpp"
#include "mbflow/maps/patch.hpp"

namespace mbflow::maps {

struct IsmParams {
    double sigma = 5.0;       // side-point offset, pixels
    double theta_ism = 0.2;   // cost-asymmetry threshold (0.2 Sintel-like, 0.6 KITTI-like)
    double grad_eps = 1e-6;   // minimum gradient magnitude for candidacy
};

// min{ c23(x, F23(y)), c21(x, F21(y)) }; the backward term drops out when
// I1/F21 are absent.
inline double bidirectional_cost(const ImageBuffer* I1, const ImageBuffer& I2,
                                 const ImageBuffer& I3, const FlowField* F21,
                                 const FlowField& F23, Point2 x, Point2 y) {
    Vec2 fwd = bilinear_sample(F23, y);
    double cost = matching_cost(I2, I3, x, fwd);
    if (I1 && F21) {
        Vec2 bwd = bilinear_sample(*F21, y);
        cost = std::min(cost, matching_cost(I2, *I1, x, bwd));
    }
    return cost;
}

inline CostQuad side_costs(const ImageBuffer* I1, const ImageBuffer& I2, const ImageBuffer& I3,
                           const FlowField* F21, const FlowField& F23, Point2 a, Point2 c) {
    CostQuad q;
    q.m_aa = bidirectional_cost(I1, I2, I3, F21, F23, a, a);
    q.m_ac = bidirectional_cost(I1, I2, I3, F21, F23, a, c);
    q.m_ca = bidirectional_cost(I1, I2, I3, F21, F23, c, a);
    q.m_cc = bidirectional_cost(I1, I2, I3, F21, F23, c, c);
    return q;
}

inline BinaryMap ism_map(const ImageBuffer* I1, const ImageBuffer& I2, const ImageBuffer& I3,
                         const FlowField* F21, const FlowField& F23, const BinaryMap& candidates,
                         const IsmParams& params, unsigned jobs = 1) {
    require_same_size(I2, I3, "ism_map");
    require_same_size(I2, F23, "ism_map");
    require_same_size(I2, candidates, "ism_map");
    if (I1) require_same_size(I2, *I1, "ism_map");
    if (F21) require_same_size(I2, *F21, "ism_map");

    const FlowField grad = brightness_gradient(to_luminance(I2));
    const int w = I2.width(), h = I2.height();
    BinaryMap out(w, h);
    parallel_for_rows(0, h, jobs, [&](int y) {
        for (int x = 0; x < w; ++x) {
            if (!candidates.at(x, y)) continue;
            UnitVec2 u;
            if (!normalize(grad.at(x, y), params.grad_eps, u)) continue;
            Point2 b{static_cast<double>(x), static_cast<double>(y)};
            Point2 a = b + params.sigma * u.vec();
            Point2 c = b - params.sigma * u.vec();
            CostQuad m = side_costs(I1, I2, I3, F21, F23, a, c);
            double asym = std::max(m.m_ac - m.m_cc, m.m_ca - m.m_aa);
            out.set(x, y, asym > params.theta_ism);
        }
    });
    return out;
}

}  // namespace mbflow::maps
