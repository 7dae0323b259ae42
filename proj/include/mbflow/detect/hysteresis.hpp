#pragma once

// Hysteresis combination of the three evidence maps. Strong pixels are
// motion-discrepancy detections; weak pixels need both the image edge and
// the invalid-smooth-motion map. A weak pixel survives when it is 8-connected
// to a strong pixel through other strong/weak pixels (full connected
// component, as in Canny hysteresis). Flood fill, linear in pixels.

#include <cstdint>
#include <vector>

#include "mbflow/core/types.hpp"

namespace mbflow::detect {

enum class HysteresisLabel : uint8_t { None = 0, Weak = 1, Strong = 2 };

inline std::vector<HysteresisLabel> label_pixels(const BinaryMap& m_md, const BinaryMap& m_e,
                                                 const BinaryMap& m_ism) {
    require_same_size(m_md, m_e, "hysteresis_combine");
    require_same_size(m_md, m_ism, "hysteresis_combine");
    std::vector<HysteresisLabel> labels(m_md.data().size(), HysteresisLabel::None);
    for (size_t i = 0; i < labels.size(); ++i) {
        if (m_md.data()[i])
            labels[i] = HysteresisLabel::Strong;
        else if (m_e.data()[i] && m_ism.data()[i])
            labels[i] = HysteresisLabel::Weak;
    }
    return labels;
}

// Seeds a flood fill at every strong pixel and walks the 8-connected
// strong-or-weak component around it. Output = everything reached.
inline BinaryMap promote_weak(const BinaryMap& strong, const BinaryMap& weak) {
    require_same_size(strong, weak, "promote_weak");
    const int w = strong.width(), h = strong.height();
    BinaryMap out(w, h);
    std::vector<int32_t> stack;
    stack.reserve(256);
    auto passable = [&](int x, int y) { return strong.at(x, y) || weak.at(x, y); };
    for (int y0 = 0; y0 < h; ++y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            if (!strong.at(x0, y0) || out.at(x0, y0)) continue;
            out.set(x0, y0, true);
            stack.push_back(y0 * w + x0);
            while (!stack.empty()) {
                int32_t idx = stack.back();
                stack.pop_back();
                int cx = idx % w, cy = idx / w;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        if (out.at(nx, ny) || !passable(nx, ny)) continue;
                        out.set(nx, ny, true);
                        stack.push_back(ny * w + nx);
                    }
                }
            }
        }
    }
    return out;
}

inline BinaryMap hysteresis_combine(const BinaryMap& m_md, const BinaryMap& m_e,
                                    const BinaryMap& m_ism) {
    auto labels = label_pixels(m_md, m_e, m_ism);
    const int w = m_md.width(), h = m_md.height();
    BinaryMap weak(w, h);
    for (size_t i = 0; i < labels.size(); ++i)
        weak.data()[i] = labels[i] == HysteresisLabel::Weak ? 1 : 0;
    return promote_weak(m_md, weak);
}

}  // namespace mbflow::detect
