#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace coldpack {

// Flat key = value configuration file. Lines starting with '#' (or blank)
// are skipped; values may be scalars or comma-separated lists. Command-line
// flags override file values.
class KeyValueConfig {
  public:
    KeyValueConfig() = default;

    static KeyValueConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open config file " + path);
        KeyValueConfig cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            auto eq = t.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                            ": expected key = value");
            cfg.values_[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    long long get_int(const std::string& key, long long fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            std::size_t pos;
            long long v = std::stoll(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument(it->second);
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("config key '" + key + "': bad integer '" +
                                        it->second + "'");
        }
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            std::size_t pos;
            double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument(it->second);
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("config key '" + key + "': bad number '" +
                                        it->second + "'");
        }
    }

    std::vector<double> get_double_list(const std::string& key) const {
        std::vector<double> out;
        auto it = values_.find(key);
        if (it == values_.end()) return out;
        std::stringstream ss(it->second);
        std::string part;
        while (std::getline(ss, part, ',')) {
            part = trim(part);
            if (part.empty()) continue;
            try {
                out.push_back(std::stod(part));
            } catch (const std::exception&) {
                throw std::invalid_argument("config key '" + key + "': bad list entry '" +
                                            part + "'");
            }
        }
        return out;
    }

    const std::map<std::string, std::string>& entries() const { return values_; }

    std::string to_string() const {
        std::ostringstream out;
        for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
        return out.str();
    }

  private:
    static std::string trim(const std::string& s) {
        std::size_t a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        std::size_t b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    std::map<std::string, std::string> values_;
};

}  // namespace coldpack
