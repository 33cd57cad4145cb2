#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scenic/rng.hpp"

namespace scenic {

using ConfigMap = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

// INI-style text: [section] headers, key = value lines, # or ; comments.
// Keys are flattened to "section.key".
inline ConfigMap parse_ini(const std::string& text) {
    ConfigMap out;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": unterminated section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
        out[section.empty() ? key : section + "." + key] = value;
    }
    return out;
}

inline ConfigMap read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_ini(buf.str());
}

inline std::string get_string(const ConfigMap& m, const std::string& key,
                              const std::string& fallback) {
    const auto it = m.find(key);
    return it == m.end() ? fallback : it->second;
}

inline double get_double(const ConfigMap& m, const std::string& key, double fallback) {
    const auto it = m.find(key);
    if (it == m.end()) return fallback;
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size())
        throw std::runtime_error("config key " + key + ": bad number '" + it->second + "'");
    return v;
}

inline int get_int(const ConfigMap& m, const std::string& key, int fallback) {
    const auto it = m.find(key);
    if (it == m.end()) return fallback;
    std::size_t pos = 0;
    const long v = std::stol(it->second, &pos);
    if (pos != it->second.size())
        throw std::runtime_error("config key " + key + ": bad integer '" + it->second + "'");
    return static_cast<int>(v);
}

inline std::uint64_t get_u64(const ConfigMap& m, const std::string& key,
                             std::uint64_t fallback) {
    const auto it = m.find(key);
    if (it == m.end()) return fallback;
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(it->second, &pos);
    if (pos != it->second.size())
        throw std::runtime_error("config key " + key + ": bad integer '" + it->second + "'");
    return static_cast<std::uint64_t>(v);
}

inline std::vector<int> get_int_list(const ConfigMap& m, const std::string& key,
                                     std::vector<int> fallback) {
    const auto it = m.find(key);
    if (it == m.end()) return fallback;
    std::vector<int> out;
    std::istringstream in(it->second);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = detail::trim(tok);
        if (tok.empty()) continue;
        out.push_back(std::stoi(tok));
    }
    return out;
}

// Stable fingerprint of every setting except the seed, so seed sweeps of one
// configuration share an artifact directory.
inline std::string config_hash(const ConfigMap& m) {
    std::string canonical;
    for (const auto& [key, value] : m) {
        if (key == "global.seed") continue;
        canonical += key;
        canonical += '=';
        canonical += value;
        canonical += '\n';
    }
    const std::uint64_t h = fnv1a64(canonical);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace scenic
