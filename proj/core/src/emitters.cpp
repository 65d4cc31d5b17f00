#include "llsi/emitters.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

namespace llsi {

using detail::format;

std::string device_kind_name(DeviceKind k) {
    switch (k) {
    case DeviceKind::PassTransistor: return "pass_transistor";
    case DeviceKind::ConfigCell: return "config_cell";
    case DeviceKind::FfCore: return "ff_core";
    case DeviceKind::Buffer: return "buffer";
    }
    return "?";
}

DeviceKind device_kind_from_name(std::string_view name) {
    if (name == "pass_transistor") return DeviceKind::PassTransistor;
    if (name == "config_cell") return DeviceKind::ConfigCell;
    if (name == "ff_core") return DeviceKind::FfCore;
    if (name == "buffer") return DeviceKind::Buffer;
    throw ParseError("unknown device kind '" + std::string(name) + "'");
}

ResponseTable ResponseTable::defaults() {
    ResponseTable t;
    auto fill = [&](DeviceKind k, double on, double off) {
        for (int v = 0; v < 2; ++v) {
            t.amp_[(int)k][1][v] = on;
            t.amp_[(int)k][0][v] = off;
        }
    };
    fill(DeviceKind::PassTransistor, 1.0, 0.25);
    fill(DeviceKind::ConfigCell, 0.6, 0.4);
    fill(DeviceKind::FfCore, 0.9, 0.5);
    fill(DeviceKind::Buffer, 0.7, 0.45);
    return t;
}

void ResponseTable::set(DeviceKind kind, bool conducting, bool value, double amplitude) {
    amp_[(int)kind][conducting][value] = amplitude;
}

void ResponseTable::check() const {
    for (int k = 0; k < 4; ++k)
        for (int c = 0; c < 2; ++c)
            for (int v = 0; v < 2; ++v)
                if (amp_[k][c][v] < 0)
                    throw InvariantError(format("negative amplitude for %s",
                                                device_kind_name((DeviceKind)k).c_str()));
    for (int k = 0; k < 4; ++k)
        for (int v = 0; v < 2; ++v)
            if (!(amp_[k][1][v] > amp_[k][0][v]))
                throw InvariantError(format(
                    "conducting amplitude must exceed non-conducting for %s (value=%d)",
                    device_kind_name((DeviceKind)k).c_str(), v));
}

ResponseTable ResponseTable::from_text(std::string_view text) {
    ResponseTable t = defaults();
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto toks = detail::tokens(line);
        if (toks.size() != 4)
            throw ParseError("expected: kind conducting value amplitude", lineno);
        DeviceKind kind = device_kind_from_name(toks[0]);
        if ((toks[1] != "0" && toks[1] != "1") || (toks[2] != "0" && toks[2] != "1"))
            throw ParseError("conducting/value must be 0 or 1", lineno);
        char* end = nullptr;
        double amp = std::strtod(toks[3].c_str(), &end);
        if (end == toks[3].c_str() || *end)
            throw ParseError("bad amplitude '" + toks[3] + "'", lineno);
        t.set(kind, toks[1] == "1", toks[2] == "1", amp);
    }
    t.check();
    return t;
}

ResponseTable ResponseTable::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open response table '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

EmitterMap expand_emitters(const FabricConfig& cfg, const NodeValues& values,
                           const ResponseTable& table, const FloorPlan& fp) {
    EmitterMap out;
    auto emit = [&](Point p, DeviceKind kind, bool conducting, bool value, const CellRef& origin) {
        out.push_back({p.x, p.y, kind, conducting, value,
                       table.amplitude(kind, conducting, value), origin});
    };
    auto net_value = [&](const std::string& net) -> bool {
        auto it = values.find(net);
        if (it == values.end()) throw Error("no value for net '" + net + "'");
        return it->second;
    };

    for (const Tile& tile : cfg.tiles) {
        for (const Slice& sl : tile.slices) {
            for (const LUTConfig& lut : sl.luts) {
                CellRef cell{tile.col, tile.row, sl.name, lut.name};
                const DeviceRect& rect = fp.device(cell);
                int width = 1 << lut.arity;
                for (int i = 0; i < width; ++i) {
                    bool bit = lut.used && lut.init.bit(i);
                    emit(config_cell_position(rect, i), DeviceKind::ConfigCell, bit, bit, cell);
                }
                if (!lut.used) continue;
                std::array<bool, 8> ins{};
                for (size_t i = 0; i < lut.input_nets.size(); ++i)
                    ins[i] = net_value(lut.input_nets[i]);
                MuxTreeState tree =
                    lut_mux_states(lut.init, std::span<const bool>(ins.data(),
                                                                   lut.input_nets.size()));
                for (const MuxState& m : tree.muxes) {
                    emit(mux_position(rect, m.level, m.index, 0), DeviceKind::PassTransistor,
                         !m.select, m.in0, cell);
                    emit(mux_position(rect, m.level, m.index, 1), DeviceKind::PassTransistor,
                         m.select, m.in1, cell);
                }
            }
            for (const FFConfig& ff : sl.ffs) {
                if (!ff.used) continue;
                CellRef cell{tile.col, tile.row, sl.name, ff.name};
                const DeviceRect& rect = fp.device(cell);
                emit(ff_core_position(rect), DeviceKind::FfCore, ff.state, ff.state, cell);
                emit(ff_buffer_position(rect), DeviceKind::Buffer, ff.state, ff.state, cell);
            }
        }
        if (!tile.switchbox.routes.empty()) {
            CellRef cell{tile.col, tile.row, "", "SBOX"};
            const DeviceRect& rect = fp.device(cell);
            auto routes = tile.switchbox.routes;
            std::sort(routes.begin(), routes.end());
            for (const Route& r : routes) {
                bool carried = net_value(r.src);
                emit(route_pass_position(rect, r), DeviceKind::PassTransistor, true, carried,
                     cell);
                emit(route_buffer_position(rect, r), DeviceKind::Buffer, carried, carried, cell);
            }
        }
    }
    return out;
}

} // namespace llsi
