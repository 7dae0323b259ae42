#pragma once

// CSV output: header row, ',' separator, '.' decimal point, LF endings.
// Numbers use shortest round-trip formatting.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mbflow/core/types.hpp"

namespace mbflow::io {

inline std::string format_number(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, end);
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    // column index by header name, -1 when absent
    int column(const std::string& name) const {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open file: " + path.string());
    CsvTable table;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        size_t start = 0;
        while (true) {
            size_t comma = s.find(',', start);
            cells.push_back(s.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return cells;
    };
    if (!std::getline(in, line)) throw FormatError("CSV: empty file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.header = split(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split(line);
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells) {
            double v = 0.0;
            auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || p != cell.data() + cell.size())
                throw FormatError("CSV: non-numeric cell '" + cell + "' in " + path.string());
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open file for writing: " + path.string());
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_number(row[i]);
        }
        out << '\n';
    }
    if (!out) throw FormatError("short write: " + path.string());
}

}  // namespace mbflow::io
