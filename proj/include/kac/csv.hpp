#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kac/errors.hpp"

namespace kac {

// 17 significant digits: enough to round-trip any double, and the reason two
// runs with the same seed produce byte-identical files.
inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Minimal RFC-4180 writer.  Every file starts with the schema comment line.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw Error("cannot open for writing: " + path);
        out_ << "# kac-relax v1\n";
    }

    void comment(const std::string& text) { out_ << "# " << text << "\n"; }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << quote(fields[i]);
        }
        out_ << '\n';
    }

private:
    static std::string quote(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        q += '"';
        return q;
    }

    std::ofstream out_;
};

// Reads two-column numeric CSV (v, f) used for custom density grids; '#'
// lines and a non-numeric header row are skipped.
inline void read_csv_pairs(const std::string& path, std::vector<double>& a,
                           std::vector<double>& b) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open for reading: " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double x, y;
        if (ss >> x >> y) {
            a.push_back(x);
            b.push_back(y);
        }
    }
    if (a.empty()) throw Error("no numeric rows in " + path);
}

}  // namespace kac
