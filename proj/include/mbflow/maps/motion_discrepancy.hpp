#pragma once

// Motion discrepancy map: the classical baseline. Thresholds the Frobenius
// norm of the flow Jacobian, sqrt(u_x^2 + u_y^2 + v_x^2 + v_y^2), computed
// with central differences over replicated borders.

#include <cmath>

#include "mbflow/core/types.hpp"

namespace mbflow::maps {

inline ScalarMap flow_gradient_magnitude(const FlowField& flow) {
    const int w = flow.width(), h = flow.height();
    ScalarMap mag(w, h);
    auto at = [&](int x, int y) {
        return flow.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            Vec2 dx = 0.5 * (at(x + 1, y) - at(x - 1, y));
            Vec2 dy = 0.5 * (at(x, y + 1) - at(x, y - 1));
            mag.at(x, y) = std::sqrt(dx.x * dx.x + dx.y * dx.y + dy.x * dy.x + dy.y * dy.y);
        }
    }
    return mag;
}

inline BinaryMap motion_discrepancy_map(const FlowField& flow, double theta_md) {
    if (!(theta_md > 0.0))
        throw std::invalid_argument("motion_discrepancy_map: theta_md must be positive");
    ScalarMap mag = flow_gradient_magnitude(flow);
    BinaryMap out(flow.width(), flow.height());
    for (size_t i = 0; i < mag.data().size(); ++i) out.data()[i] = mag.data()[i] > theta_md;
    return out;
}

}  // namespace mbflow::maps
