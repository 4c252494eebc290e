#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "psmkt/errors.hpp"

namespace psmkt {

namespace detail {
inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}
} // namespace detail

/// Plain-text configuration: one "section.key = value" per line, '#' starts
/// a comment, blank lines ignored. Duplicate keys are an error; consumers
/// call require_known() so unknown keys are errors too.
class KeyValueConfig {
public:
    static KeyValueConfig parse_string(const std::string& text, const std::string& origin = "<string>") {
        KeyValueConfig cfg;
        std::istringstream in(text);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = detail::trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw DataError(origin + ":" + std::to_string(lineno) + ": expected key = value");
            const std::string key = detail::trim(line.substr(0, eq));
            const std::string value = detail::trim(line.substr(eq + 1));
            if (key.empty())
                throw DataError(origin + ":" + std::to_string(lineno) + ": empty key");
            if (!cfg.entries_.emplace(key, value).second)
                throw DataError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
        return cfg;
    }

    static KeyValueConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open config file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_string(buf.str(), path);
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string get_string(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) throw DataError("missing config key '" + key + "'");
        return it->second;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key) const { return to_double(key, get_string(key)); }

    double get_double(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    long long get_int(const std::string& key) const {
        const std::string v = get_string(key);
        std::size_t pos = 0;
        long long out = 0;
        try {
            out = std::stoll(v, &pos);
        } catch (const std::exception&) {
            throw DataError("config key '" + key + "': not an integer: '" + v + "'");
        }
        if (pos != v.size()) throw DataError("config key '" + key + "': not an integer: '" + v + "'");
        return out;
    }

    long long get_int(const std::string& key, long long fallback) const {
        return has(key) ? get_int(key) : fallback;
    }

    /// Errors out when the file carries a key outside the allowed set.
    void require_known(const std::set<std::string>& allowed) const {
        for (const auto& [key, value] : entries_) {
            (void)value;
            if (!allowed.count(key)) throw DataError("unknown config key '" + key + "'");
        }
    }

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    static double to_double(const std::string& key, const std::string& v) {
        std::size_t pos = 0;
        double out = 0.0;
        try {
            out = std::stod(v, &pos);
        } catch (const std::exception&) {
            throw DataError("config key '" + key + "': not a number: '" + v + "'");
        }
        if (pos != v.size()) throw DataError("config key '" + key + "': not a number: '" + v + "'");
        return out;
    }

    std::map<std::string, std::string> entries_;
};

} // namespace psmkt
