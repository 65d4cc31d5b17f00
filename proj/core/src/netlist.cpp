#include "llsi/netlist.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>

namespace llsi {

using detail::format;

bool lut_eval(const LutInit& init, std::span<const bool> inputs) {
    if (init.width != (1 << inputs.size()))
        throw ArgumentError(format("init width %d does not match %zu inputs", init.width,
                                   inputs.size()));
    int index = 0;
    for (size_t i = 0; i < inputs.size(); ++i)
        if (inputs[i]) index |= 1 << i;
    return init.bit(index);
}

MuxTreeState lut_mux_states(const LutInit& init, std::span<const bool> inputs) {
    int arity = (int)inputs.size();
    if (init.width != (1 << arity))
        throw ArgumentError(format("init width %d does not match %d inputs", init.width, arity));

    MuxTreeState tree;
    std::vector<bool> level_values(init.width);
    for (int i = 0; i < init.width; ++i) level_values[i] = init.bit(i);

    for (int level = 0; level < arity; ++level) {
        bool sel = inputs[level];
        int muxes = 1 << (arity - 1 - level);
        std::vector<bool> next(muxes);
        for (int j = 0; j < muxes; ++j) {
            MuxState m;
            m.level = level;
            m.index = j;
            m.select = sel;
            m.in0 = level_values[2 * j];
            m.in1 = level_values[2 * j + 1];
            m.out = sel ? m.in1 : m.in0;
            next[j] = m.out;
            tree.muxes.push_back(m);
        }
        level_values = std::move(next);
    }
    tree.root = arity == 0 ? init.bit(0) : level_values[0];
    return tree;
}

namespace {

struct NetUse {
    std::set<std::string> nets;

    void add(const std::string& n) {
        if (!n.empty()) nets.insert(n);
    }
};

} // namespace

Netlist build_netlist(const FabricConfig& cfg) {
    Netlist nl;
    NetUse all;

    for (const auto& p : cfg.pins) all.add(p.net);
    for (int t = 0; t < (int)cfg.tiles.size(); ++t) {
        const Tile& tile = cfg.tiles[t];
        for (int s = 0; s < (int)tile.slices.size(); ++s) {
            const Slice& sl = tile.slices[s];
            for (int i = 0; i < (int)sl.luts.size(); ++i) {
                const LUTConfig& lut = sl.luts[i];
                if (!lut.used) continue;
                for (const auto& in : lut.input_nets) all.add(in);
                all.add(lut.output_net);
                if (!lut.output_net.empty())
                    nl.drivers[lut.output_net] = {NetDriver::Kind::Lut, false, t, s, i, {}};
            }
            for (int i = 0; i < (int)sl.ffs.size(); ++i) {
                const FFConfig& ff = sl.ffs[i];
                if (!ff.used) continue;
                all.add(ff.d_net);
                all.add(ff.q_net);
                if (!ff.q_net.empty())
                    nl.drivers[ff.q_net] = {NetDriver::Kind::Ff, false, t, s, i, {}};
            }
        }
        for (const auto& r : tile.switchbox.routes) {
            all.add(r.src);
            all.add(r.sink);
            nl.drivers[r.sink] = {NetDriver::Kind::Route, false, t, -1, -1, r.src};
        }
    }
    for (const auto& p : cfg.pins)
        nl.drivers[p.net] = {NetDriver::Kind::Pin, p.value, -1, -1, -1, {}};
    nl.drivers["0"] = {NetDriver::Kind::Const, false, -1, -1, -1, {}};
    nl.drivers["1"] = {NetDriver::Kind::Const, true, -1, -1, -1, {}};
    all.add("0");
    all.add("1");

    nl.nets.assign(all.nets.begin(), all.nets.end());

    // combinational dependency edges: LUT output <- inputs, route sink <- src
    std::map<std::string, std::vector<std::string>> deps;
    for (const auto& net : nl.nets) {
        auto it = nl.drivers.find(net);
        if (it == nl.drivers.end()) continue;
        const NetDriver& d = it->second;
        if (d.kind == NetDriver::Kind::Lut) {
            const LUTConfig& lut = cfg.tiles[d.tile].slices[d.slice].luts[d.element];
            for (const auto& in : lut.input_nets)
                if (!in.empty()) deps[net].push_back(in);
        } else if (d.kind == NetDriver::Kind::Route) {
            deps[net].push_back(d.route_src);
        }
    }

    // Kahn's algorithm over the dependency graph
    std::map<std::string, int> pending;
    std::map<std::string, std::vector<std::string>> consumers;
    for (const auto& [net, ins] : deps) {
        std::set<std::string> uniq(ins.begin(), ins.end());
        pending[net] = (int)uniq.size();
        for (const auto& in : uniq) consumers[in].push_back(net);
    }
    std::vector<std::string> ready;
    for (const auto& net : nl.nets)
        if (!pending.count(net)) ready.push_back(net);
    size_t head = 0;
    while (head < ready.size()) {
        std::string net = ready[head++];
        nl.topo_order.push_back(net);
        auto it = consumers.find(net);
        if (it == consumers.end()) continue;
        for (const auto& consumer : it->second)
            if (--pending[consumer] == 0) ready.push_back(consumer);
    }
    if (nl.topo_order.size() != nl.nets.size()) {
        std::vector<std::string> cycle;
        for (const auto& [net, n] : pending)
            if (n > 0) cycle.push_back(net);
        std::string msg = "combinational loop through nets:";
        for (const auto& n : cycle) msg += " " + n;
        throw CombinationalLoopError(msg, std::move(cycle));
    }
    return nl;
}

NodeValues evaluate_logic(const Netlist& nl, const FabricConfig& cfg) {
    NodeValues values;
    values.reserve(nl.nets.size());

    auto value_of = [&](const std::string& net) -> bool {
        auto it = values.find(net);
        if (it == values.end())
            throw Error("undriven net '" + net + "' referenced during evaluation");
        return it->second;
    };

    for (const auto& net : nl.topo_order) {
        auto dit = nl.drivers.find(net);
        if (dit == nl.drivers.end()) continue;  // undriven; fails only if read
        const NetDriver& d = dit->second;
        switch (d.kind) {
        case NetDriver::Kind::Const:
        case NetDriver::Kind::Pin:
            values[net] = d.const_value;
            break;
        case NetDriver::Kind::Ff:
            values[net] = cfg.tiles[d.tile].slices[d.slice].ffs[d.element].state;
            break;
        case NetDriver::Kind::Route:
            values[net] = value_of(d.route_src);
            break;
        case NetDriver::Kind::Lut: {
            const LUTConfig& lut = cfg.tiles[d.tile].slices[d.slice].luts[d.element];
            std::array<bool, 8> ins{};
            size_t n = lut.input_nets.size();
            for (size_t i = 0; i < n; ++i) ins[i] = value_of(lut.input_nets[i]);
            values[net] = lut_eval(lut.init, std::span<const bool>(ins.data(), n));
            break;
        }
        }
    }

    for (const auto& net : nl.nets)
        if (!values.count(net))
            throw Error("undriven net '" + net + "' in design");
    return values;
}

} // namespace llsi
