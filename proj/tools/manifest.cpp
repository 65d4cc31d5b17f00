#include "manifest.hpp"

#include <fstream>
#include <sstream>

namespace llsi::tool {

void RunManifest::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write manifest '" + path + "'");
    for (const auto& [k, v] : entries) out << k << "=" << v << "\n";
    if (!out) throw Error("short write to '" + path + "'");
}

RunManifest RunManifest::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open manifest '" + path + "'");
    RunManifest m;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto trimmed = detail::trim(line);
        if (trimmed.empty() || trimmed[0] == '#') continue;
        auto eq = trimmed.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(path + ": expected key=value", lineno);
        m.entries.emplace_back(std::string(trimmed.substr(0, eq)),
                               std::string(trimmed.substr(eq + 1)));
    }
    return m;
}

} // namespace llsi::tool
