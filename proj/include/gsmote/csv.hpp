#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsmote {

// Shortest representation that round-trips a double exactly.
inline std::string format_double(double v) {
    char buf[40];
    const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
    // Prefer a shorter form when it parses back to the same bits.
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[40];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        if (std::strtod(shorter, nullptr) == v) return shorter;
    }
    return std::string(buf, static_cast<std::size_t>(n));
}

inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

// Splits one CSV line on commas. No quoting support; the file formats here
// never contain embedded commas.
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

// Reads all lines, dropping a UTF-8 BOM and trailing CR if present.
inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first && line.size() >= 3 && line[0] == '\xEF' && line[1] == '\xBB' &&
            line[2] == '\xBF') {
            line.erase(0, 3);
        }
        first = false;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

// Strict finite-double parse of one cell; empty or partial tokens fail.
inline bool parse_cell(const std::string& raw, double& out) {
    const std::string t = trim(raw);
    if (t.empty()) return false;
    const char* begin = t.data();
    const char* end = begin + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) return false;
    return std::isfinite(out);
}

}  // namespace gsmote
