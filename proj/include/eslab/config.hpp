#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eslab/core.hpp"

namespace eslab {

// Line-oriented structured config text:
//   # comment
//   top_level_key value
//   [section]            or  [section argument]
//   key value...
// Values run to the end of the line; list values are space separated.

struct ConfigSection {
    std::string name;  // "" for the top-level section
    std::string arg;   // optional section argument, e.g. [solution es]
    std::vector<std::pair<std::string, std::string>> entries;

    const std::string* find(const std::string& key) const {
        for (const auto& [k, v] : entries) {
            if (k == key) return &v;
        }
        return nullptr;
    }

    void set(const std::string& key, const std::string& value) {
        for (auto& [k, v] : entries) {
            if (k == key) {
                v = value;
                return;
            }
        }
        entries.emplace_back(key, value);
    }

    std::string qualified(const std::string& key) const {
        if (name.empty()) return key;
        if (arg.empty()) return name + "." + key;
        return name + " " + arg + "." + key;
    }
};

struct ConfigFile {
    std::vector<ConfigSection> sections;  // sections[0] is always the top level

    ConfigFile() { sections.push_back(ConfigSection{}); }

    ConfigSection& top() { return sections[0]; }
    const ConfigSection& top() const { return sections[0]; }

    ConfigSection* find(const std::string& name, const std::string& arg = "") {
        for (auto& s : sections) {
            if (s.name == name && (arg.empty() ? true : s.arg == arg)) return &s;
        }
        return nullptr;
    }
    const ConfigSection* find(const std::string& name, const std::string& arg = "") const {
        return const_cast<ConfigFile*>(this)->find(name, arg);
    }

    ConfigSection& get_or_create(const std::string& name, const std::string& arg = "") {
        if (ConfigSection* s = find(name, arg)) return *s;
        sections.push_back(ConfigSection{name, arg, {}});
        return sections.back();
    }

    std::vector<const ConfigSection*> all(const std::string& name) const {
        std::vector<const ConfigSection*> out;
        for (const auto& s : sections) {
            if (s.name == name) out.push_back(&s);
        }
        return out;
    }
};

namespace detail {
inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}
}  // namespace detail

inline ConfigFile parse_config(const std::string& text) {
    ConfigFile cfg;
    ConfigSection* current = &cfg.top();
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = detail::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(lineno),
                                  "malformed section header: " + line);
            }
            const std::string inner = detail::trim(line.substr(1, line.size() - 2));
            if (inner.empty()) {
                throw ConfigError("line " + std::to_string(lineno), "empty section header");
            }
            const auto space = inner.find(' ');
            ConfigSection section;
            if (space == std::string::npos) {
                section.name = inner;
            } else {
                section.name = detail::trim(inner.substr(0, space));
                section.arg = detail::trim(inner.substr(space + 1));
            }
            cfg.sections.push_back(std::move(section));
            current = &cfg.sections.back();
            continue;
        }
        const auto space = line.find_first_of(" \t");
        const std::string key =
            space == std::string::npos ? line : detail::trim(line.substr(0, space));
        const std::string value =
            space == std::string::npos ? "" : detail::trim(line.substr(space + 1));
        if (current->find(key) != nullptr) {
            throw ConfigError(current->qualified(key),
                              "duplicate key at line " + std::to_string(lineno));
        }
        current->entries.emplace_back(key, value);
    }
    return cfg;
}

inline std::string serialize_config(const ConfigFile& cfg) {
    std::ostringstream out;
    bool first = true;
    for (const auto& section : cfg.sections) {
        if (!section.name.empty()) {
            if (!first) out << "\n";
            out << "[" << section.name;
            if (!section.arg.empty()) out << " " << section.arg;
            out << "]\n";
        }
        for (const auto& [k, v] : section.entries) {
            out << k;
            if (!v.empty()) out << " " << v;
            out << "\n";
        }
        first = false;
    }
    return out.str();
}

// Applies a dotted-path override such as "optimizer.sigma=0.04" or "seed=9".
inline void apply_override(ConfigFile& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("--set", "override must look like section.key=value, got '" +
                                       assignment + "'");
    }
    const std::string path = detail::trim(assignment.substr(0, eq));
    const std::string value = detail::trim(assignment.substr(eq + 1));
    const auto dot = path.find('.');
    if (dot == std::string::npos) {
        cfg.top().set(path, value);
    } else {
        cfg.get_or_create(path.substr(0, dot)).set(path.substr(dot + 1), value);
    }
}

// Typed accessor over one section that tracks which keys were consumed so
// that leftovers can be rejected by name.
class SectionReader {
public:
    explicit SectionReader(const ConfigSection& section) : section_(section) {}

    bool has(const std::string& key) const { return section_.find(key) != nullptr; }

    std::string require_string(const std::string& key) {
        const std::string* v = section_.find(key);
        if (v == nullptr) throw ConfigError(section_.qualified(key), "missing required key");
        consumed_.insert(key);
        return *v;
    }

    std::string get_string(const std::string& key, const std::string& fallback) {
        const std::string* v = section_.find(key);
        if (v == nullptr) return fallback;
        consumed_.insert(key);
        return *v;
    }

    double get_double(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const std::string* v = section_.find(key);
        if (v == nullptr) {
            if (fallback) return *fallback;
            throw ConfigError(section_.qualified(key), "missing required key");
        }
        consumed_.insert(key);
        return parse_double(key, *v);
    }

    long long get_int(const std::string& key, std::optional<long long> fallback = std::nullopt) {
        const std::string* v = section_.find(key);
        if (v == nullptr) {
            if (fallback) return *fallback;
            throw ConfigError(section_.qualified(key), "missing required key");
        }
        consumed_.insert(key);
        try {
            std::size_t used = 0;
            const long long parsed = std::stoll(*v, &used);
            if (used != v->size()) throw std::invalid_argument("");
            return parsed;
        } catch (...) {
            throw ConfigError(section_.qualified(key), "expected an integer, got '" + *v + "'");
        }
    }

    std::uint64_t get_uint64(const std::string& key, std::optional<std::uint64_t> fallback) {
        const std::string* v = section_.find(key);
        if (v == nullptr) {
            if (fallback) return *fallback;
            throw ConfigError(section_.qualified(key), "missing required key");
        }
        consumed_.insert(key);
        try {
            std::size_t used = 0;
            const std::uint64_t parsed = std::stoull(*v, &used);
            if (used != v->size()) throw std::invalid_argument("");
            return parsed;
        } catch (...) {
            throw ConfigError(section_.qualified(key),
                              "expected an unsigned integer, got '" + *v + "'");
        }
    }

    bool get_bool(const std::string& key, std::optional<bool> fallback = std::nullopt) {
        const std::string* v = section_.find(key);
        if (v == nullptr) {
            if (fallback) return *fallback;
            throw ConfigError(section_.qualified(key), "missing required key");
        }
        consumed_.insert(key);
        if (*v == "true" || *v == "1") return true;
        if (*v == "false" || *v == "0") return false;
        throw ConfigError(section_.qualified(key), "expected true/false, got '" + *v + "'");
    }

    std::vector<double> get_doubles(const std::string& key) {
        const std::string* v = section_.find(key);
        if (v == nullptr) throw ConfigError(section_.qualified(key), "missing required key");
        consumed_.insert(key);
        std::istringstream in(*v);
        std::vector<double> out;
        std::string token;
        while (in >> token) out.push_back(parse_double(key, token));
        if (out.empty()) throw ConfigError(section_.qualified(key), "expected a list of numbers");
        return out;
    }

    // Remaining (unconsumed) entries, e.g. landscape parameter overrides.
    std::vector<std::pair<std::string, std::string>> remaining() const {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& e : section_.entries) {
            if (!consumed_.contains(e.first)) out.push_back(e);
        }
        return out;
    }

    // Rejects any key that was never consumed.
    void reject_unknown() const {
        for (const auto& [k, v] : section_.entries) {
            if (!consumed_.contains(k)) {
                throw ConfigError(section_.qualified(k), "unknown key");
            }
        }
    }

    const ConfigSection& section() const { return section_; }

private:
    double parse_double(const std::string& key, const std::string& v) {
        try {
            std::size_t used = 0;
            const double parsed = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument("");
            return parsed;
        } catch (...) {
            throw ConfigError(section_.qualified(key), "expected a number, got '" + v + "'");
        }
    }

    const ConfigSection& section_;
    std::set<std::string> consumed_;
};

}  // namespace eslab
