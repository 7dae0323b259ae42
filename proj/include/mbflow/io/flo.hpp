#pragma once

// Middlebury .flo reader/writer.
//
//   bytes 0-3   float32 202021.25 ("PIEH" in ASCII, doubles as an endian check)
//   bytes 4-7   int32 width
//   bytes 8-11  int32 height
//   12-end      row-major interleaved (u, v) float32 pairs
//
// Everything little-endian. Round trips are bit-exact for finite values.

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "mbflow/core/types.hpp"

namespace mbflow::io {

constexpr float kFloMagic = 202021.25f;
constexpr int kMaxFloDim = 100000;

namespace detail {

inline uint32_t load_le32(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
           static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

inline void store_le32(uint32_t v, unsigned char* p) {
    p[0] = static_cast<unsigned char>(v);
    p[1] = static_cast<unsigned char>(v >> 8);
    p[2] = static_cast<unsigned char>(v >> 16);
    p[3] = static_cast<unsigned char>(v >> 24);
}

inline float load_le_float(const unsigned char* p) {
    uint32_t bits = load_le32(p);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

inline void store_le_float(float f, unsigned char* p) {
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    store_le32(bits, p);
}

inline std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open file: " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path,
                             const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open file for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("short write: " + path.string());
}

}  // namespace detail

inline FlowField decode_flo(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 12) throw FormatError(".flo: truncated header");
    float magic = detail::load_le_float(bytes.data());
    if (magic != kFloMagic) throw FormatError(".flo: bad magic value");
    int32_t w = static_cast<int32_t>(detail::load_le32(bytes.data() + 4));
    int32_t h = static_cast<int32_t>(detail::load_le32(bytes.data() + 8));
    if (w <= 0 || h <= 0 || w > kMaxFloDim || h > kMaxFloDim)
        throw FormatError(".flo: dimensions out of bounds");
    size_t expect = 12 + static_cast<size_t>(w) * h * 2 * 4;
    if (bytes.size() < expect) throw FormatError(".flo: truncated data section");
    FlowField field(w, h);
    const unsigned char* p = bytes.data() + 12;
    for (size_t i = 0; i < static_cast<size_t>(w) * h * 2; ++i, p += 4)
        field.data()[i] = detail::load_le_float(p);
    return field;
}

inline std::vector<unsigned char> encode_flo(const FlowField& field) {
    for (float f : field.data())
        if (!std::isfinite(f)) throw std::invalid_argument(".flo: non-finite flow value");
    std::vector<unsigned char> bytes(12 + field.data().size() * 4);
    detail::store_le_float(kFloMagic, bytes.data());
    detail::store_le32(static_cast<uint32_t>(field.width()), bytes.data() + 4);
    detail::store_le32(static_cast<uint32_t>(field.height()), bytes.data() + 8);
    unsigned char* p = bytes.data() + 12;
    for (float f : field.data()) {
        detail::store_le_float(f, p);
        p += 4;
    }
    return bytes;
}

inline FlowField read_flo(const std::filesystem::path& path) {
    return decode_flo(detail::read_file_bytes(path));
}

inline void write_flo(const FlowField& field, const std::filesystem::path& path) {
    detail::write_file_bytes(path, encode_flo(field));
}

}  // namespace mbflow::io
