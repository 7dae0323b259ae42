#pragma once

// Run manifests. Every command writes out-dir/manifest.txt holding all
// resolved parameters and input paths in the CLI's own config syntax, so
//
//   mbflow <command> --config <out-dir>/manifest.txt [--out-dir elsewhere]
//
// reproduces the run bit-exactly. Input digests (FNV-1a 64 of the file
// bytes) ride along as comments for bookkeeping.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "mbflow/io/csv.hpp"
#include "mbflow/io/flo.hpp"

namespace mbflow::pipeline {

inline uint64_t fnv1a64(const std::vector<unsigned char>& bytes) {
    uint64_t hash = 1469598103934665603ull;
    for (unsigned char b : bytes) {
        hash ^= b;
        hash *= 1099511628211ull;
    }
    return hash;
}

inline std::string file_digest(const std::filesystem::path& path) {
    auto bytes = io::detail::read_file_bytes(path);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return std::string("fnv1a:") + buf;
}

class Manifest {
  public:
    explicit Manifest(std::string command) : command_(std::move(command)) {}

    void set(const std::string& key, const std::string& value) {
        entries_.emplace_back(key, value);
    }
    void set(const std::string& key, double value) { set(key, io::format_number(value)); }
    void set(const std::string& key, int value) { set(key, std::to_string(value)); }
    void set(const std::string& key, unsigned value) { set(key, std::to_string(value)); }

    // records the path under `key` and its content digest as a comment
    void set_input(const std::string& key, const std::string& path) {
        set(key, path);
        digests_.emplace_back(key, file_digest(path));
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot write manifest: " + path.string());
        out << "# mbflow manifest\n";
        out << "# re-run: mbflow " << command_ << " --config " << path.string() << "\n";
        for (const auto& [key, digest] : digests_)
            out << "# input-digest " << key << " " << digest << "\n";
        out << "[" << command_ << "]\n";
        for (const auto& [key, value] : entries_) out << key << " = " << value << "\n";
        if (!out) throw FormatError("short write: " + path.string());
    }

  private:
    std::string command_;
    std::vector<std::pair<std::string, std::string>> entries_;
    std::vector<std::pair<std::string, std::string>> digests_;
};

}  // namespace mbflow::pipeline
