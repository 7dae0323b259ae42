#pragma once

// Raster value types shared by every module: images in [0,1], two-channel
// flow fields in pixels/frame, boolean maps and scalar maps. All of them are
// plain row-major buffers with value semantics; nothing here owns a thread
// or mutates after construction, so instances can be shared freely.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbflow {

// Raised by readers/writers on malformed or truncated files.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Subpixel position, pixel units. Pixel centers sit at integer coordinates,
// x runs along the width, y along the height, origin at pixel (0,0).
struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

// Displacement / gradient vector, pixel units.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline Vec2 operator-(Vec2 v) { return {-v.x, -v.y}; }
inline Point2 operator+(Point2 p, Vec2 v) { return {p.x + v.x, p.y + v.y}; }
inline Point2 operator-(Point2 p, Vec2 v) { return {p.x - v.x, p.y - v.y}; }
inline Vec2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }

// Unit direction vector; construct through normalize() so the unit-length
// invariant holds within 1e-6.
struct UnitVec2 {
    double x = 1.0;
    double y = 0.0;

    UnitVec2 flipped() const { return {-x, -y}; }
    Vec2 vec() const { return {x, y}; }
};

inline Point2 operator+(Point2 p, UnitVec2 u) { return {p.x + u.x, p.y + u.y}; }

// Returns the normalized direction of v, or false when ||v|| <= eps.
inline bool normalize(Vec2 v, double eps, UnitVec2& out) {
    double n = v.norm();
    if (!(n > eps) || !std::isfinite(n)) return false;
    out = UnitVec2{v.x / n, v.y / n};
    return true;
}

namespace detail {
inline void check_dims(int width, int height, const char* what) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument(std::string(what) + ": dimensions must be positive");
}
}  // namespace detail

// h x w x {1,3} image, values normalized to [0,1], channel-interleaved.
class ImageBuffer {
  public:
    ImageBuffer() = default;
    ImageBuffer(int width, int height, int channels)
        : width_(width), height_(height), channels_(channels) {
        detail::check_dims(width, height, "ImageBuffer");
        if (channels != 1 && channels != 3)
            throw std::invalid_argument("ImageBuffer: channels must be 1 or 3");
        data_.assign(static_cast<size_t>(width) * height * channels, 0.0f);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }

    float& at(int x, int y, int c = 0) {
        return data_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
    }
    float at(int x, int y, int c = 0) const {
        return data_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
    }

    std::vector<float>& data() { return data_; }
    const std::vector<float>& data() const { return data_; }

  private:
    int width_ = 0, height_ = 0, channels_ = 1;
    std::vector<float> data_;
};

// h x w field of (u, v) displacements in pixels/frame, with an optional
// per-pixel validity mask (empty mask = all pixels valid).
class FlowField {
  public:
    FlowField() = default;
    FlowField(int width, int height) : width_(width), height_(height) {
        detail::check_dims(width, height, "FlowField");
        data_.assign(static_cast<size_t>(width) * height * 2, 0.0f);
    }

    int width() const { return width_; }
    int height() const { return height_; }

    float& u(int x, int y) { return data_[(static_cast<size_t>(y) * width_ + x) * 2]; }
    float u(int x, int y) const { return data_[(static_cast<size_t>(y) * width_ + x) * 2]; }
    float& v(int x, int y) { return data_[(static_cast<size_t>(y) * width_ + x) * 2 + 1]; }
    float v(int x, int y) const { return data_[(static_cast<size_t>(y) * width_ + x) * 2 + 1]; }

    Vec2 at(int x, int y) const { return {u(x, y), v(x, y)}; }
    void set(int x, int y, Vec2 f) {
        u(x, y) = static_cast<float>(f.x);
        v(x, y) = static_cast<float>(f.y);
    }

    bool has_mask() const { return !valid_.empty(); }
    bool is_valid(int x, int y) const {
        return valid_.empty() || valid_[static_cast<size_t>(y) * width_ + x] != 0;
    }
    void set_valid(int x, int y, bool v) {
        if (valid_.empty()) valid_.assign(static_cast<size_t>(width_) * height_, 1);
        valid_[static_cast<size_t>(y) * width_ + x] = v ? 1 : 0;
    }

    std::vector<float>& data() { return data_; }
    const std::vector<float>& data() const { return data_; }
    const std::vector<uint8_t>& mask() const { return valid_; }

  private:
    int width_ = 0, height_ = 0;
    std::vector<float> data_;
    std::vector<uint8_t> valid_;
};

// h x w boolean map (motion boundaries, evidence maps, labels).
class BinaryMap {
  public:
    BinaryMap() = default;
    BinaryMap(int width, int height) : width_(width), height_(height) {
        detail::check_dims(width, height, "BinaryMap");
        data_.assign(static_cast<size_t>(width) * height, 0);
    }

    int width() const { return width_; }
    int height() const { return height_; }

    bool at(int x, int y) const { return data_[static_cast<size_t>(y) * width_ + x] != 0; }
    void set(int x, int y, bool v) { data_[static_cast<size_t>(y) * width_ + x] = v ? 1 : 0; }

    size_t count() const {
        size_t n = 0;
        for (uint8_t b : data_) n += b != 0;
        return n;
    }

    std::vector<uint8_t>& data() { return data_; }
    const std::vector<uint8_t>& data() const { return data_; }

  private:
    int width_ = 0, height_ = 0;
    std::vector<uint8_t> data_;
};

// h x w real-valued map (gradient magnitudes, distance maps). Distance maps
// use +infinity as the no-site sentinel; everything else stays finite.
class ScalarMap {
  public:
    ScalarMap() = default;
    ScalarMap(int width, int height, double fill = 0.0) : width_(width), height_(height) {
        detail::check_dims(width, height, "ScalarMap");
        data_.assign(static_cast<size_t>(width) * height, fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }

    double& at(int x, int y) { return data_[static_cast<size_t>(y) * width_ + x]; }
    double at(int x, int y) const { return data_[static_cast<size_t>(y) * width_ + x]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    static constexpr double infinity() { return std::numeric_limits<double>::infinity(); }

  private:
    int width_ = 0, height_ = 0;
    std::vector<double> data_;
};

template <class A, class B>
inline bool same_size(const A& a, const B& b) {
    return a.width() == b.width() && a.height() == b.height();
}

template <class A, class B>
inline void require_same_size(const A& a, const B& b, const char* what) {
    if (!same_size(a, b))
        throw std::invalid_argument(std::string(what) + ": field dimensions differ (" +
                                    std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                                    " vs " + std::to_string(b.width()) + "x" +
                                    std::to_string(b.height()) + ")");
}

}  // namespace mbflow
