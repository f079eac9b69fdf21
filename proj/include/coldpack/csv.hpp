#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace coldpack {

// Minimal CSV support for the dataset files. Fields never contain commas,
// quotes or newlines (ids are plain tokens, everything else is numeric or an
// ISO date), so no quoting layer is needed.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
    t.header = split_csv_line(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto row = split_csv_line(line);
        if (row.size() != t.header.size()) {
            throw std::runtime_error(path + ": row " + std::to_string(lineno) +
                                     " has " + std::to_string(row.size()) +
                                     " fields, expected " + std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline std::string join_csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += fields[i];
    }
    return out;
}

inline void write_csv(const std::string& path, const CsvTable& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << join_csv_row(t.header) << '\n';
    for (const auto& row : t.rows) out << join_csv_row(row) << '\n';
}

inline long long parse_ll(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("bad integer for " + what + ": '" + s + "'");
    }
}

inline double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("bad number for " + what + ": '" + s + "'");
    }
}

}  // namespace coldpack
