#include "llsi/trojan.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "llsi/demos.hpp"
#include "llsi/netlist.hpp"

namespace llsi {

using detail::format;
using detail::split;

std::string patch_kind_name(PatchKind k) {
    switch (k) {
    case PatchKind::SetInit: return "set_init";
    case PatchKind::SetPin: return "set_pin";
    case PatchKind::SetFfState: return "set_ff_state";
    case PatchKind::SetRoute: return "set_route";
    case PatchKind::AddRouteThru: return "add_route_thru";
    case PatchKind::MoveRouteThru: return "move_route_thru";
    case PatchKind::AddGates: return "add_gates";
    case PatchKind::AddCounter: return "add_counter";
    }
    return "?";
}

PatchKind patch_kind_from_name(std::string_view name) {
    for (int k = 0; k <= (int)PatchKind::AddCounter; ++k)
        if (patch_kind_name((PatchKind)k) == name) return (PatchKind)k;
    throw ParseError("unknown patch kind '" + std::string(name) + "'");
}

std::string gate_fn_name(GateFn f) {
    switch (f) {
    case GateFn::And: return "AND";
    case GateFn::Or: return "OR";
    case GateFn::Nand: return "NAND";
    case GateFn::Nor: return "NOR";
    case GateFn::Xor: return "XOR";
    case GateFn::Not: return "NOT";
    }
    return "?";
}

GateFn gate_fn_from_name(std::string_view name) {
    for (int f = 0; f <= (int)GateFn::Not; ++f)
        if (gate_fn_name((GateFn)f) == name) return (GateFn)f;
    throw ParseError("unknown gate function '" + std::string(name) + "'");
}

static bool gate_value(GateFn fn, unsigned bits, int n) {
    int ones = 0;
    for (int i = 0; i < n; ++i) ones += (bits >> i) & 1;
    switch (fn) {
    case GateFn::And: return ones == n;
    case GateFn::Nand: return ones != n;
    case GateFn::Or: return ones > 0;
    case GateFn::Nor: return ones == 0;
    case GateFn::Xor: return (ones & 1) != 0;
    case GateFn::Not: return ones == 0;
    }
    return false;
}

LutInit gate_init(GateFn fn, int n_inputs, int arity) {
    if (n_inputs < 1 || n_inputs > arity)
        throw ArgumentError(format("gate with %d inputs does not fit arity %d", n_inputs, arity));
    if (fn == GateFn::Not && n_inputs != 1)
        throw ArgumentError("NOT takes exactly one input");
    uint64_t bits = 0;
    for (int idx = 0; idx < (1 << arity); ++idx)
        if (gate_value(fn, unsigned(idx), n_inputs)) bits |= 1ull << idx;
    return {bits, 1 << arity};
}

// ---- spec file format --------------------------------------------------------

TrojanSpec parse_trojan_spec(std::string_view text) {
    TrojanSpec spec;
    bool have_label = false;
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
        if (toks[0] == "trojan") {
            spec.label = std::string(detail::trim(line.substr(6)));
            have_label = true;
        } else if (toks[0] == "patch") {
            if (toks.size() != 4) throw ParseError("patch takes <kind> target=... payload=...", lineno);
            Patch p;
            p.kind = patch_kind_from_name(toks[1]);
            for (size_t i = 2; i < toks.size(); ++i) {
                if (detail::starts_with(toks[i], "target="))
                    p.target = toks[i].substr(7);
                else if (detail::starts_with(toks[i], "payload="))
                    p.payload = toks[i].substr(8);
                else
                    throw ParseError("expected target=/payload=, got '" + toks[i] + "'", lineno);
            }
            if (p.target.empty() || p.payload.empty())
                throw ParseError("patch needs both target= and payload=", lineno);
            spec.patches.push_back(std::move(p));
        } else {
            throw ParseError("unknown keyword '" + toks[0] + "'", lineno);
        }
    }
    if (!have_label) throw ParseError("missing 'trojan <label>' line");
    return spec;
}

std::string serialize_trojan_spec(const TrojanSpec& spec) {
    std::string out = "trojan " + spec.label + "\n";
    for (const Patch& p : spec.patches)
        out += format("patch %s target=%s payload=%s\n", patch_kind_name(p.kind).c_str(),
                      p.target.c_str(), p.payload.c_str());
    return out;
}

TrojanSpec load_trojan_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open trojan spec '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_trojan_spec(ss.str());
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

void save_trojan_spec(const TrojanSpec& spec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write trojan spec '" + path + "'");
    out << serialize_trojan_spec(spec);
    if (!out) throw Error("short write to '" + path + "'");
}

// ---- application --------------------------------------------------------------

namespace {

struct Working {
    FabricConfig& cfg;
    const std::string& label;

    LUTConfig& lut(const std::string& cell) {
        auto idx = find_element(cfg, cell);
        if (!idx || idx->kind != ElementIndex::Kind::Lut)
            throw ArgumentError("unknown LUT cell '" + cell + "'");
        return cfg.tiles[idx->tile].slices[idx->slice].luts[idx->element];
    }
    FFConfig& ff(const std::string& cell) {
        auto idx = find_element(cfg, cell);
        if (!idx || idx->kind != ElementIndex::Kind::Ff)
            throw ArgumentError("unknown FF cell '" + cell + "'");
        return cfg.tiles[idx->tile].slices[idx->slice].ffs[idx->element];
    }
    Tile& tile_of(const std::string& cell) {
        auto idx = find_element(cfg, cell);
        if (!idx) throw ArgumentError("unknown cell '" + cell + "'");
        return cfg.tiles[idx->tile];
    }

    std::set<std::string> known_nets() const {
        std::set<std::string> nets{"0", "1"};
        for (const auto& p : cfg.pins) nets.insert(p.net);
        for (const auto& t : cfg.tiles) {
            for (const auto& sl : t.slices) {
                for (const auto& l : sl.luts)
                    if (l.used) {
                        nets.insert(l.input_nets.begin(), l.input_nets.end());
                        if (!l.output_net.empty()) nets.insert(l.output_net);
                    }
                for (const auto& f : sl.ffs)
                    if (f.used) {
                        nets.insert(f.d_net);
                        if (!f.q_net.empty()) nets.insert(f.q_net);
                    }
            }
            for (const auto& r : t.switchbox.routes) {
                nets.insert(r.src);
                nets.insert(r.sink);
            }
        }
        return nets;
    }

    void add_route(Tile& tile, const Route& r) {
        auto& routes = tile.switchbox.routes;
        if (std::find(routes.begin(), routes.end(), r) != routes.end()) return;
        routes.push_back(r);
        std::sort(routes.begin(), routes.end());
    }
    void remove_route(const Route& r) {
        for (auto& t : cfg.tiles) {
            auto& routes = t.switchbox.routes;
            auto it = std::find(routes.begin(), routes.end(), r);
            if (it != routes.end()) {
                routes.erase(it);
                return;
            }
        }
        throw ArgumentError(format("no route %s->%s to remove", r.src.c_str(), r.sink.c_str()));
    }
};

std::pair<std::string, std::string> parse_route_pair(const std::string& s) {
    auto arrow = s.find("->");
    if (arrow == std::string::npos) throw ParseError("expected <src>-><sink> in '" + s + "'");
    return {s.substr(0, arrow), s.substr(arrow + 2)};
}

std::string sanitize(std::string_view s) {
    std::string out;
    for (char c : s)
        out += (std::isalnum((unsigned char)c) || c == '_') ? c : '_';
    return out;
}

GateDef parse_gate(const std::string& text) {
    // FN@cell:in1,in2->out
    auto at = text.find('@');
    auto colon = text.find(':', at == std::string::npos ? 0 : at);
    auto arrow = text.rfind("->");
    if (at == std::string::npos || colon == std::string::npos || arrow == std::string::npos ||
        arrow < colon)
        throw ParseError("bad gate '" + text + "', expected FN@cell:in,...->out");
    GateDef g;
    g.fn = gate_fn_from_name(text.substr(0, at));
    g.lut_cell = text.substr(at + 1, colon - at - 1);
    for (auto& in : split(text.substr(colon + 1, arrow - colon - 1), ','))
        if (!in.empty()) g.inputs.push_back(in);
    g.output = text.substr(arrow + 2);
    if (g.inputs.empty() || g.output.empty())
        throw ParseError("gate '" + text + "' needs inputs and an output");
    return g;
}

std::string format_gate(const GateDef& g) {
    std::string ins;
    for (size_t i = 0; i < g.inputs.size(); ++i) {
        if (i) ins += ",";
        ins += g.inputs[i];
    }
    return gate_fn_name(g.fn) + "@" + g.lut_cell + ":" + ins + "->" + g.output;
}

void apply_one(Working& w, const Patch& p) {
    switch (p.kind) {
    case PatchKind::SetInit: {
        LUTConfig& lut = w.lut(p.target);
        lut.init = LutInit::from_hex(p.payload, lut.arity);
        break;
    }
    case PatchKind::SetPin: {
        for (auto& pin : w.cfg.pins)
            if (pin.net == p.target) {
                pin.value = p.payload == "1";
                return;
            }
        throw ArgumentError("no pin drives net '" + p.target + "'");
    }
    case PatchKind::SetFfState: {
        w.ff(p.target).state = p.payload == "1";
        break;
    }
    case PatchKind::SetRoute: {
        auto colon = p.payload.rfind(':');
        if (colon == std::string::npos)
            throw ParseError("set_route payload must be <src>-><sink>:<0|1>");
        auto [src, sink] = parse_route_pair(p.payload.substr(0, colon));
        bool enable = p.payload.substr(colon + 1) == "1";
        Tile& tile = w.tile_of(p.target);
        if (enable) {
            w.add_route(tile, {src, sink});
        } else {
            auto& routes = tile.switchbox.routes;
            auto it = std::find(routes.begin(), routes.end(), Route{src, sink});
            if (it == routes.end())
                throw ArgumentError(format("no route %s->%s in %s", src.c_str(), sink.c_str(),
                                           p.target.c_str()));
            routes.erase(it);
        }
        break;
    }
    case PatchKind::AddRouteThru: {
        auto [src, sink] = parse_route_pair(p.payload);
        LUTConfig& lut = w.lut(p.target);
        if (lut.used)
            throw ArgumentError("route-thru target '" + p.target + "' is already in use");
        auto nets = w.known_nets();
        if (!nets.count(src)) throw ArgumentError("unknown source net '" + src + "'");
        if (!nets.count(sink)) throw ArgumentError("unknown sink net '" + sink + "'");
        std::string fresh = "rt_" + sanitize(p.target);
        if (nets.count(fresh)) throw ArgumentError("net '" + fresh + "' already exists");
        w.remove_route({src, sink});
        lut.init = route_thru_init(lut.arity);
        lut.input_nets.assign(size_t(lut.arity), "0");
        lut.input_nets[0] = src;
        lut.output_net = fresh;
        lut.used = true;
        w.add_route(w.tile_of(p.target), {fresh, sink});
        break;
    }
    case PatchKind::MoveRouteThru: {
        if (p.target == p.payload) return;  // moving in place changes nothing
        LUTConfig& from = w.lut(p.target);
        if (!from.used || !(from.init == route_thru_init(from.arity)))
            throw ArgumentError("no route-thru LUT at '" + p.target + "'");
        LUTConfig& to = w.lut(p.payload);
        if (to.used) throw ArgumentError("destination '" + p.payload + "' is already in use");
        if (to.arity != from.arity)
            throw ArgumentError("route-thru arity mismatch between source and destination");

        to.init = from.init;
        to.input_nets = from.input_nets;
        to.output_net = from.output_net;
        to.used = true;
        std::string out_net = from.output_net;
        from.init = {0, 1 << from.arity};
        from.input_nets.assign(size_t(from.arity), "0");
        from.output_net.clear();
        from.used = false;

        // output routes follow the LUT into its new switchbox
        Tile& from_tile = w.tile_of(p.target);
        Tile& to_tile = w.tile_of(p.payload);
        std::vector<Route> moved;
        auto& routes = from_tile.switchbox.routes;
        for (auto it = routes.begin(); it != routes.end();) {
            if (it->src == out_net) {
                moved.push_back(*it);
                it = routes.erase(it);
            } else {
                ++it;
            }
        }
        for (const Route& r : moved) w.add_route(to_tile, r);
        break;
    }
    case PatchKind::AddGates: {
        auto nets = w.known_nets();
        for (const std::string& text : split(p.payload, ';')) {
            GateDef g = parse_gate(text);
            LUTConfig& lut = w.lut(g.lut_cell);
            if (lut.used)
                throw ArgumentError("gate target '" + g.lut_cell + "' is already in use");
            if ((int)g.inputs.size() > lut.arity)
                throw ArgumentError(format("gate '%s' has %zu inputs, LUT arity is %d",
                                           text.c_str(), g.inputs.size(), lut.arity));
            for (const auto& in : g.inputs)
                if (!nets.count(in)) throw ArgumentError("unknown gate input net '" + in + "'");
            if (nets.count(g.output))
                throw ArgumentError("gate output net '" + g.output + "' already exists");
            lut.init = gate_init(g.fn, (int)g.inputs.size(), lut.arity);
            lut.input_nets = g.inputs;
            while ((int)lut.input_nets.size() < lut.arity) lut.input_nets.push_back("0");
            lut.output_net = g.output;
            lut.used = true;
            nets.insert(g.output);
        }
        break;
    }
    case PatchKind::AddCounter: {
        auto at = p.payload.find('@');
        if (at == std::string::npos) throw ParseError("add_counter payload must be <n>@...");
        int n_states = std::atoi(p.payload.substr(0, at).c_str());
        if (n_states < 1) throw ParseError("counter needs at least one state");
        std::vector<std::string> ff_cells, ns_cells, trig_cells;
        for (const std::string& part : split(p.payload.substr(at + 1), ';')) {
            auto eq = part.find('=');
            if (eq == std::string::npos) throw ParseError("bad add_counter payload part '" + part + "'");
            std::string key = part.substr(0, eq);
            auto cells = split(part.substr(eq + 1), ',');
            if (key == "ff") ff_cells = cells;
            else if (key == "ns") ns_cells = cells;
            else if (key == "trig") trig_cells = cells;
            else throw ParseError("unknown add_counter key '" + key + "'");
        }
        int bits = 0;
        while ((1 << bits) < n_states + 1) ++bits;
        if ((int)ff_cells.size() != bits || (int)ns_cells.size() != bits ||
            trig_cells.size() != 1)
            throw ArgumentError(format("counter with %d states needs %d FFs, %d next-state "
                                       "LUTs and one trigger LUT",
                                       n_states, bits, bits));

        std::string prefix = "tj_" + sanitize(w.label);
        auto nets = w.known_nets();
        auto fresh = [&](const std::string& suffix) {
            std::string net = prefix + "_" + suffix;
            if (nets.count(net)) throw ArgumentError("net '" + net + "' already exists");
            nets.insert(net);
            return net;
        };

        std::vector<std::string> q(bits), d(bits), ns_out(bits);
        for (int i = 0; i < bits; ++i) {
            q[i] = fresh(format("q%d", i));
            d[i] = fresh(format("d%d", i));
            ns_out[i] = fresh(format("ns%d", i));
        }
        for (int i = 0; i < bits; ++i) {
            FFConfig& ff = w.ff(ff_cells[i]);
            if (ff.used) throw ArgumentError("counter FF '" + ff_cells[i] + "' is already in use");
            ff.state = false;
            ff.d_net = d[i];
            ff.q_net = q[i];
            ff.used = true;
            w.add_route(w.tile_of(ff_cells[i]), {ns_out[i], d[i]});
        }
        for (int i = 0; i < bits; ++i) {
            LUTConfig& lut = w.lut(ns_cells[i]);
            if (lut.used)
                throw ArgumentError("counter LUT '" + ns_cells[i] + "' is already in use");
            if (i + 1 > lut.arity)
                throw ArgumentError(format("counter bit %d needs %d LUT inputs, arity is %d",
                                           i, i + 1, lut.arity));
            // bit_i' = q_i XOR (q_0 & ... & q_{i-1}); self is selector 0
            uint64_t init_bits = 0;
            for (int idx = 0; idx < (1 << lut.arity); ++idx) {
                bool self = idx & 1;
                bool carry = true;
                for (int j = 0; j < i; ++j) carry = carry && ((idx >> (j + 1)) & 1);
                if (self != carry) init_bits |= 1ull << idx;
            }
            lut.init = {init_bits, 1 << lut.arity};
            lut.input_nets.assign(size_t(lut.arity), "0");
            lut.input_nets[0] = q[i];
            for (int j = 0; j < i; ++j) lut.input_nets[size_t(j + 1)] = q[j];
            lut.output_net = ns_out[i];
            lut.used = true;
        }
        {
            LUTConfig& lut = w.lut(trig_cells[0]);
            if (lut.used)
                throw ArgumentError("trigger LUT '" + trig_cells[0] + "' is already in use");
            if (bits > lut.arity)
                throw ArgumentError(format("trigger needs %d inputs, arity is %d", bits,
                                           lut.arity));
            // fires at the terminal count n_states - 1
            unsigned terminal = unsigned(n_states - 1);
            uint64_t init_bits = 0;
            for (int idx = 0; idx < (1 << lut.arity); ++idx)
                if ((unsigned(idx) & ((1u << bits) - 1)) == terminal) init_bits |= 1ull << idx;
            lut.init = {init_bits, 1 << lut.arity};
            lut.input_nets.assign(size_t(lut.arity), "0");
            for (int j = 0; j < bits; ++j) lut.input_nets[size_t(j)] = q[j];
            lut.output_net = fresh("trig");
            lut.used = true;
        }
        break;
    }
    }
}

} // namespace

FabricConfig apply_patch(const FabricConfig& cfg, const TrojanSpec& spec) {
    FabricConfig out = cfg;
    Working w{out, spec.label};
    for (const Patch& p : spec.patches) apply_one(w, p);
    auto violations = validate(out);
    if (!violations.empty())
        throw InvariantError("patched config is invalid: " + violations[0].entity + ": " +
                             violations[0].message);
    return out;
}

// ---- generators ----------------------------------------------------------------

TrojanSpec add_route_thru(const FabricConfig& cfg, const CellRef& at, const std::string& source,
                          const std::string& sink) {
    TrojanSpec spec;
    spec.label = "route-thru-" + sanitize(at.display());
    spec.patches.push_back({PatchKind::AddRouteThru, at.display(), source + "->" + sink});
    apply_patch(cfg, spec);  // surface errors now
    return spec;
}

TrojanSpec move_route_thru(const FabricConfig& cfg, const CellRef& from, const CellRef& to) {
    TrojanSpec spec;
    spec.label = "route-thru-move";
    spec.patches.push_back({PatchKind::MoveRouteThru, from.display(), to.display()});
    apply_patch(cfg, spec);
    return spec;
}

namespace {

struct Candidates {
    std::vector<std::string> lut_cells;  // unused LUT display names, canonical order
    std::vector<std::string> ff_cells;   // unused FFs
    std::vector<std::string> taps;       // driven non-constant nets
    std::vector<std::pair<std::string, Route>> routes;  // (sbox display, route)
};

Candidates collect_candidates(const FabricConfig& cfg) {
    Candidates c;
    for (const Tile& t : cfg.tiles) {
        for (const Slice& sl : t.slices) {
            for (const LUTConfig& lut : sl.luts)
                if (!lut.used) c.lut_cells.push_back(sl.name + "." + lut.name);
            for (const FFConfig& ff : sl.ffs)
                if (!ff.used) c.ff_cells.push_back(sl.name + "." + ff.name);
        }
        for (const Route& r : t.switchbox.routes)
            c.routes.push_back({format("SBOX(%d,%d)", t.col, t.row), r});
    }
    std::set<std::string> taps;
    for (const auto& p : cfg.pins) taps.insert(p.net);
    for (const Tile& t : cfg.tiles) {
        for (const Slice& sl : t.slices) {
            for (const LUTConfig& lut : sl.luts)
                if (lut.used && !lut.output_net.empty()) taps.insert(lut.output_net);
            for (const FFConfig& ff : sl.ffs)
                if (ff.used && !ff.q_net.empty()) taps.insert(ff.q_net);
        }
        for (const Route& r : t.switchbox.routes) taps.insert(r.sink);
    }
    c.taps.assign(taps.begin(), taps.end());
    std::sort(c.lut_cells.begin(), c.lut_cells.end());
    std::sort(c.ff_cells.begin(), c.ff_cells.end());
    std::sort(c.routes.begin(), c.routes.end(),
              [](const auto& a, const auto& b) { return std::tie(a.first, a.second) <
                                                        std::tie(b.first, b.second); });
    return c;
}

template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng() % i]);
}

} // namespace

TrojanSpec gen_trit_tc(const FabricConfig& cfg, int n_gates, uint64_t seed) {
    if (n_gates < 2) throw ArgumentError("trit-tc needs at least 2 gates (trigger + payload)");
    Candidates cand = collect_candidates(cfg);
    if ((int)cand.lut_cells.size() < n_gates)
        throw ArgumentError(format("need %d unused LUTs, only %zu available", n_gates,
                                   cand.lut_cells.size()));
    if (cand.taps.empty()) throw ArgumentError("design has no nets to tap");
    std::vector<std::pair<std::string, Route>> victims;
    for (const auto& r : cand.routes)
        if (!is_const_net(r.second.src)) victims.push_back(r);
    if (victims.empty())
        throw ArgumentError("design has no re-routable switchbox route for the payload");

    std::mt19937_64 rng(seed ^ 0x7472697463ull);
    seeded_shuffle(cand.lut_cells, rng);
    auto [victim_sbox, victim] = victims[rng() % victims.size()];

    // Taps inside the victim sink's combinational cone would close a loop
    // through the payload gate; drop them.
    std::map<std::string, std::vector<std::string>> feeds;
    for (const Tile& t : cfg.tiles) {
        for (const Slice& sl : t.slices)
            for (const LUTConfig& lut : sl.luts)
                if (lut.used && !lut.output_net.empty())
                    for (const auto& in : lut.input_nets)
                        if (!is_const_net(in)) feeds[in].push_back(lut.output_net);
        for (const Route& r : t.switchbox.routes) feeds[r.src].push_back(r.sink);
    }
    std::set<std::string> forbidden{victim.sink};
    std::vector<std::string> frontier{victim.sink};
    while (!frontier.empty()) {
        std::string net = std::move(frontier.back());
        frontier.pop_back();
        auto it = feeds.find(net);
        if (it == feeds.end()) continue;
        for (const auto& next : it->second)
            if (forbidden.insert(next).second) frontier.push_back(next);
    }
    std::erase_if(cand.taps, [&](const std::string& n) { return forbidden.count(n) > 0; });
    if (cand.taps.empty())
        throw ArgumentError("no tappable nets outside the victim's downstream cone");

    const auto& tr = family_traits(cfg.family);
    int max_ins = std::min(4, tr.lut_arity);

    // trigger tree over existing nets; payload gate is built afterwards
    NodeValues base = evaluate_logic(build_netlist(cfg), cfg);
    auto tap_value = [&](const std::string& net) { return base.at(net); };

    std::vector<GateDef> gates;
    std::set<std::string> used_nets;
    std::string prev_out;
    bool prev_value = false;
    static const GateFn tree_fns[] = {GateFn::And, GateFn::Or, GateFn::Nand, GateFn::Nor};
    for (int i = 0; i < n_gates - 1; ++i) {
        GateDef g;
        g.fn = tree_fns[rng() % 4];
        g.lut_cell = cand.lut_cells[size_t(i)];
        int want = 1 + int(rng() % uint64_t(max_ins));
        if (i > 0) g.inputs.push_back(prev_out);
        while ((int)g.inputs.size() < want)
            g.inputs.push_back(cand.taps[rng() % cand.taps.size()]);
        g.output = format("tjtc%llu_g%d", (unsigned long long)seed, i);
        // evaluate the gate on the halted-clock values
        unsigned bits = 0;
        for (size_t k = 0; k < g.inputs.size(); ++k) {
            bool v = (i > 0 && k == 0) ? prev_value : tap_value(g.inputs[k]);
            if (v) bits |= 1u << k;
        }
        bool out = gate_value(g.fn, bits, (int)g.inputs.size());
        if (i == n_gates - 2 && out) {
            // force the trigger dormant under the design's default state
            g.fn = g.fn == GateFn::And  ? GateFn::Nand
                   : g.fn == GateFn::Nand ? GateFn::And
                   : g.fn == GateFn::Or   ? GateFn::Nor
                                          : GateFn::Or;
            out = !out;
        }
        prev_out = g.output;
        prev_value = out;
        gates.push_back(std::move(g));
    }

    // payload: victim XOR trigger, spliced into the victim's route
    GateDef payload;
    payload.fn = GateFn::Xor;
    payload.lut_cell = cand.lut_cells[size_t(n_gates - 1)];
    payload.inputs = {victim.src, prev_out};
    payload.output = format("tjtc%llu_p", (unsigned long long)seed);
    gates.push_back(payload);

    TrojanSpec spec;
    spec.label = format("trit-tc-%d-s%llu", n_gates, (unsigned long long)seed);
    std::string gate_text;
    for (size_t i = 0; i < gates.size(); ++i) {
        if (i) gate_text += ";";
        gate_text += format_gate(gates[i]);
    }
    spec.patches.push_back({PatchKind::AddGates, "-", gate_text});
    spec.patches.push_back({PatchKind::SetRoute, victim_sbox,
                            victim.src + "->" + victim.sink + ":0"});
    // the payload output takes over the victim's sink from the payload's tile
    auto payload_idx = find_element(cfg, payload.lut_cell);
    const Tile& ptile = cfg.tiles[payload_idx->tile];
    spec.patches.push_back({PatchKind::SetRoute, format("SBOX(%d,%d)", ptile.col, ptile.row),
                            payload.output + "->" + victim.sink + ":1"});
    apply_patch(cfg, spec);
    return spec;
}

TrojanSpec gen_trit_ts(const FabricConfig& cfg, int n_states, uint64_t seed) {
    if (n_states < 1) throw ArgumentError("trit-ts needs at least one state");
    int bits = 0;
    while ((1 << bits) < n_states + 1) ++bits;
    const auto& tr = family_traits(cfg.family);
    if (bits > tr.lut_arity)
        throw ArgumentError(format("%d-state counter needs arity >= %d", n_states, bits));

    Candidates cand = collect_candidates(cfg);
    if ((int)cand.ff_cells.size() < bits)
        throw ArgumentError(format("need %d unused FFs, only %zu available", bits,
                                   cand.ff_cells.size()));
    if ((int)cand.lut_cells.size() < bits + 1)
        throw ArgumentError(format("need %d unused LUTs, only %zu available", bits + 1,
                                   cand.lut_cells.size()));

    std::mt19937_64 rng(seed ^ 0x747269747363ull);
    seeded_shuffle(cand.ff_cells, rng);
    seeded_shuffle(cand.lut_cells, rng);

    TrojanSpec spec;
    spec.label = format("trit-ts-%d-s%llu", n_states, (unsigned long long)seed);
    std::string payload = format("%d@ff=", n_states);
    for (int i = 0; i < bits; ++i) payload += (i ? "," : "") + cand.ff_cells[size_t(i)];
    payload += ";ns=";
    for (int i = 0; i < bits; ++i) payload += (i ? "," : "") + cand.lut_cells[size_t(i)];
    payload += ";trig=" + cand.lut_cells[size_t(bits)];
    spec.patches.push_back({PatchKind::AddCounter, "-", payload});
    apply_patch(cfg, spec);
    return spec;
}

bool verify_dormant(const FabricConfig& cfg, const TrojanSpec& spec) {
    NodeValues before = evaluate_logic(build_netlist(cfg), cfg);
    FabricConfig patched = apply_patch(cfg, spec);
    NodeValues after = evaluate_logic(build_netlist(patched), patched);
    for (const auto& [net, value] : before) {
        auto it = after.find(net);
        if (it == after.end() || it->second != value) return false;
    }
    return true;
}

TrojanSpec builtin_trojan(const FabricConfig& cfg, const std::string& text, uint64_t seed) {
    auto parts = split(text, ':');
    const std::string& kind = parts[0];
    auto expect = [&](size_t n) {
        if (parts.size() != n)
            throw ArgumentError("builtin '" + kind + "' takes " + std::to_string(n - 1) +
                                " argument(s)");
    };
    if (kind == "trit-tc") {
        expect(2);
        return gen_trit_tc(cfg, std::atoi(parts[1].c_str()), seed);
    }
    if (kind == "trit-ts") {
        expect(2);
        return gen_trit_ts(cfg, std::atoi(parts[1].c_str()), seed);
    }
    if (kind == "init-flip") {
        expect(4);
        auto idx = find_element(cfg, parts[1]);
        if (!idx || idx->kind != ElementIndex::Kind::Lut)
            throw ArgumentError("unknown LUT cell '" + parts[1] + "'");
        const LUTConfig& lut = cfg.tiles[idx->tile].slices[idx->slice].luts[idx->element];
        LutInit from = LutInit::from_hex(parts[2], lut.arity);
        if (!(lut.init == from))
            throw ArgumentError(format("LUT %s has init %s, not %s", parts[1].c_str(),
                                       lut.init.to_hex().c_str(), from.to_hex().c_str()));
        LutInit to = LutInit::from_hex(parts[3], lut.arity);
        TrojanSpec spec;
        spec.label = "init-flip-" + sanitize(parts[1]);
        spec.patches.push_back({PatchKind::SetInit, parts[1], to.to_hex()});
        apply_patch(cfg, spec);
        return spec;
    }
    if (kind == "ff-toggle") {
        expect(2);
        auto idx = find_element(cfg, parts[1]);
        if (!idx || idx->kind != ElementIndex::Kind::Ff)
            throw ArgumentError("unknown FF cell '" + parts[1] + "'");
        const FFConfig& ff = cfg.tiles[idx->tile].slices[idx->slice].ffs[idx->element];
        TrojanSpec spec;
        spec.label = "ff-toggle-" + sanitize(parts[1]);
        spec.patches.push_back({PatchKind::SetFfState, parts[1], ff.state ? "0" : "1"});
        apply_patch(cfg, spec);
        return spec;
    }
    if (kind == "route-thru-add") {
        expect(4);
        auto idx = find_element(cfg, parts[1]);
        if (!idx || idx->kind != ElementIndex::Kind::Lut)
            throw ArgumentError("unknown LUT cell '" + parts[1] + "'");
        const Tile& t = cfg.tiles[idx->tile];
        const Slice& sl = t.slices[idx->slice];
        CellRef cell{t.col, t.row, sl.name, sl.luts[idx->element].name};
        return add_route_thru(cfg, cell, parts[2], parts[3]);
    }
    if (kind == "route-thru-move") {
        expect(3);
        TrojanSpec spec;
        spec.label = "route-thru-move";
        spec.patches.push_back({PatchKind::MoveRouteThru, parts[1], parts[2]});
        apply_patch(cfg, spec);
        return spec;
    }
    throw ArgumentError("unknown builtin trojan '" + text + "'");
}

} // namespace llsi
