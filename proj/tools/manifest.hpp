#pragma once

#include <string>
#include <utility>
#include <vector>

#include "llsi/common.hpp"

namespace llsi::tool {

/// Ordered key=value record written alongside every command's outputs; a run
/// can be reproduced bit-exactly from it via `llsiscope rerun`.
struct RunManifest {
    std::vector<std::pair<std::string, std::string>> entries;

    void set(const std::string& key, const std::string& value) {
        for (auto& [k, v] : entries)
            if (k == key) {
                v = value;
                return;
            }
        entries.emplace_back(key, value);
    }
    void set(const std::string& key, double value) { set(key, detail::format_double(value)); }
    void set(const std::string& key, int value) { set(key, std::to_string(value)); }
    void set(const std::string& key, uint64_t value) { set(key, std::to_string(value)); }

    const std::string* find(const std::string& key) const {
        for (const auto& [k, v] : entries)
            if (k == key) return &v;
        return nullptr;
    }
    std::string get(const std::string& key) const {
        const std::string* v = find(key);
        if (!v) throw Error("manifest is missing key '" + key + "'");
        return *v;
    }
    std::string get_or(const std::string& key, const std::string& fallback) const {
        const std::string* v = find(key);
        return v ? *v : fallback;
    }

    void save(const std::string& path) const;
    static RunManifest load(const std::string& path);
};

} // namespace llsi::tool
