#pragma once

// Flow-file format tags and autodetection (.flo -> Middlebury, .png -> KITTI).

#include <optional>

#include "mbflow/io/flo.hpp"
#include "mbflow/io/kitti.hpp"

namespace mbflow::io {

enum class FlowFormat { MiddleburyFlo, KittiPng16 };

inline std::optional<FlowFormat> parse_flow_format(const std::string& name) {
    if (name == "flo") return FlowFormat::MiddleburyFlo;
    if (name == "kitti") return FlowFormat::KittiPng16;
    if (name.empty() || name == "auto") return std::nullopt;
    throw FormatError("unknown flow format '" + name + "' (expected flo, kitti or auto)");
}

inline FlowField read_flow(const std::filesystem::path& path,
                           std::optional<FlowFormat> format = std::nullopt) {
    if (!format) {
        auto ext = path.extension().string();
        if (ext == ".flo")
            format = FlowFormat::MiddleburyFlo;
        else if (ext == ".png")
            format = FlowFormat::KittiPng16;
        else
            throw FormatError("cannot infer flow format from extension: " + path.string());
    }
    return *format == FlowFormat::MiddleburyFlo ? read_flo(path) : read_kitti_flow(path);
}

}  // namespace mbflow::io
