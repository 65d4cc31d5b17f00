#include <doctest.h>

#include <set>

#include "llsi/demos.hpp"
#include "llsi/netlist.hpp"
#include "llsi/trojan.hpp"
#include "support.hpp"

using namespace llsi;

namespace {

FabricConfig host() { return make_demo(Family::SeriesK, 6, 4, "route-thru"); }

const LUTConfig& lut_at(const FabricConfig& cfg, const std::string& name) {
    auto idx = find_element(cfg, name);
    REQUIRE(idx.has_value());
    REQUIRE(idx->kind == ElementIndex::Kind::Lut);
    return cfg.tiles[idx->tile].slices[idx->slice].luts[idx->element];
}

const FFConfig& ff_at(const FabricConfig& cfg, const std::string& name) {
    auto idx = find_element(cfg, name);
    REQUIRE(idx.has_value());
    REQUIRE(idx->kind == ElementIndex::Kind::Ff);
    return cfg.tiles[idx->tile].slices[idx->slice].ffs[idx->element];
}

int used_luts(const FabricConfig& cfg) {
    int n = 0;
    for (const auto& t : cfg.tiles)
        for (const auto& sl : t.slices)
            for (const auto& lut : sl.luts) n += lut.used;
    return n;
}

int used_ffs(const FabricConfig& cfg) {
    int n = 0;
    for (const auto& t : cfg.tiles)
        for (const auto& sl : t.slices)
            for (const auto& ff : sl.ffs) n += ff.used;
    return n;
}

// structural diff: display names of every element or switchbox that changed
std::set<std::string> changed_elements(const FabricConfig& a, const FabricConfig& b) {
    std::set<std::string> out;
    REQUIRE(a.tiles.size() == b.tiles.size());
    for (size_t t = 0; t < a.tiles.size(); ++t) {
        const Tile& ta = a.tiles[t];
        const Tile& tb = b.tiles[t];
        for (size_t s = 0; s < ta.slices.size(); ++s) {
            for (size_t i = 0; i < ta.slices[s].luts.size(); ++i)
                if (!(ta.slices[s].luts[i] == tb.slices[s].luts[i]))
                    out.insert(ta.slices[s].name + "." + ta.slices[s].luts[i].name);
            for (size_t i = 0; i < ta.slices[s].ffs.size(); ++i)
                if (!(ta.slices[s].ffs[i] == tb.slices[s].ffs[i]))
                    out.insert(ta.slices[s].name + "." + ta.slices[s].ffs[i].name);
        }
        if (!(ta.switchbox == tb.switchbox))
            out.insert(detail::format("SBOX(%d,%d)", ta.col, ta.row));
    }
    if (!(a.pins == b.pins)) out.insert("pins");
    return out;
}

} // namespace

TEST_CASE("set_init changes exactly the targeted LUT") {
    FabricConfig cfg = make_blank_config(Family::SeriesK, 2, 2);
    auto idx = find_element(cfg, "SLICE_X1Y1.D6LUT");
    cfg.tiles[idx->tile].slices[idx->slice].luts[idx->element].init =
        LutInit::from_hex("0x0000f000", 6);

    TrojanSpec spec;
    spec.label = "four-bit";
    spec.patches.push_back({PatchKind::SetInit, "SLICE_X1Y1.D6LUT", "0x000ff000"});
    FabricConfig patched = apply_patch(cfg, spec);

    CHECK(changed_elements(cfg, patched) == std::set<std::string>{"SLICE_X1Y1.D6LUT"});
    CHECK(lut_at(patched, "SLICE_X1Y1.D6LUT").init == LutInit::from_hex("0x000ff000", 6));
    CHECK(validate(patched).empty());
}

TEST_CASE("set_ff_state flips only the targeted FF") {
    FabricConfig cfg = make_demo(Family::SeriesK, 6, 4, "ff-toggle-pair");
    TrojanSpec spec;
    spec.label = "toggle";
    spec.patches.push_back({PatchKind::SetFfState, "SLICE_X0Y1.DFF", "1"});
    FabricConfig patched = apply_patch(cfg, spec);
    CHECK(changed_elements(cfg, patched) == std::set<std::string>{"SLICE_X0Y1.DFF"});
    CHECK(ff_at(patched, "SLICE_X0Y1.DFF").state);
}

TEST_CASE("empty patch list is the identity") {
    FabricConfig cfg = host();
    TrojanSpec spec;
    spec.label = "noop";
    CHECK(apply_patch(cfg, spec) == cfg);
}

TEST_CASE("apply_patch errors: unknown cell, bad init, allocating a used element") {
    FabricConfig cfg = host();
    TrojanSpec spec;
    spec.label = "bad";
    spec.patches.push_back({PatchKind::SetInit, "SLICE_X9Y9.A6LUT", "0x0"});
    CHECK_THROWS_AS((void)apply_patch(cfg, spec), ArgumentError);

    spec.patches = {{PatchKind::SetInit, "SLICE_X1Y1.A6LUT", "0x" + std::string(20, 'f')}};
    CHECK_THROWS_AS((void)apply_patch(cfg, spec), ParseError);

    // the route-thru demo already uses SLICE_X1Y1.A6LUT
    spec.patches = {{PatchKind::AddRouteThru, "SLICE_X1Y1.A6LUT", "sig_src->sig_dst"}};
    CHECK_THROWS_AS((void)apply_patch(cfg, spec), ArgumentError);
}

TEST_CASE("add_route_thru keeps the design function and reroutes the signal") {
    // golden: plain route src -> dst, a consumer LUT mixing in three more pins
    FabricConfig cfg = make_blank_config(Family::SeriesK, 6, 4);
    for (int i = 0; i < 4; ++i) cfg.pins.push_back({detail::format("p%d", i), false});
    cfg.tiles[0].switchbox.routes = {{"p0", "mid"}};
    auto consumer = find_element(cfg, "SLICE_X0Y0.A6LUT");
    LUTConfig& lc = cfg.tiles[consumer->tile].slices[consumer->slice].luts[consumer->element];
    lc.used = true;
    lc.init = gate_init(GateFn::Xor, 4, 6);
    lc.input_nets[0] = "mid";
    lc.input_nets[1] = "p1";
    lc.input_nets[2] = "p2";
    lc.input_nets[3] = "p3";
    lc.output_net = "out";
    REQUIRE(validate(cfg).empty());

    auto idx = find_element(cfg, "SLICE_X1Y1.A6LUT");
    const Tile& t = cfg.tiles[idx->tile];
    CellRef at{t.col, t.row, t.slices[idx->slice].name, "A6LUT"};
    TrojanSpec spec = add_route_thru(cfg, at, "p0", "mid");
    FabricConfig patched = apply_patch(cfg, spec);
    CHECK(validate(patched).empty());
    CHECK(lut_at(patched, "SLICE_X1Y1.A6LUT").used);

    // functional equivalence over every pin assignment
    for (unsigned v = 0; v < 16; ++v) {
        FabricConfig g = cfg, p = patched;
        for (int i = 0; i < 4; ++i) {
            g.pins[i].value = (v >> i) & 1;
            p.pins[i].value = (v >> i) & 1;
        }
        NodeValues vg = evaluate_logic(build_netlist(g), g);
        NodeValues vp = evaluate_logic(build_netlist(p), p);
        REQUIRE(vg.at("out") == vp.at("out"));
        REQUIRE(vg.at("mid") == vp.at("mid"));
    }

    // the direct route is gone; the signal now passes through the LUT
    bool direct = false;
    for (const auto& tile : patched.tiles)
        for (const auto& r : tile.switchbox.routes) direct |= r == Route{"p0", "mid"};
    CHECK(!direct);

    CHECK_THROWS_AS((void)add_route_thru(patched, at, "p0", "mid"), ArgumentError);
}

TEST_CASE("move_route_thru relocates the LUT and its routing") {
    FabricConfig cfg = host();
    TrojanSpec spec = move_route_thru(cfg, {0, 1, "SLICE_X1Y1", "A6LUT"},
                                      {2, 0, "SLICE_X4Y0", "A6LUT"});
    FabricConfig patched = apply_patch(cfg, spec);
    CHECK(validate(patched).empty());

    CHECK(!lut_at(patched, "SLICE_X1Y1.A6LUT").used);
    CHECK(lut_at(patched, "SLICE_X4Y0.A6LUT").used);
    CHECK(lut_at(patched, "SLICE_X4Y0.A6LUT").init == route_thru_init(6));

    auto changed = changed_elements(cfg, patched);
    CHECK(changed.count("SLICE_X1Y1.A6LUT"));
    CHECK(changed.count("SLICE_X4Y0.A6LUT"));
    CHECK(changed.count("SBOX(0,1)"));
    CHECK(changed.count("SBOX(2,0)"));
    CHECK(changed.size() == 4);

    // function preserved under every pin assignment
    for (int v = 0; v <= 1; ++v) {
        FabricConfig g = cfg, p = patched;
        g.pins[0].value = v;
        p.pins[0].value = v;
        NodeValues vg = evaluate_logic(build_netlist(g), g);
        NodeValues vp = evaluate_logic(build_netlist(p), p);
        for (const auto& [net, val] : vg) REQUIRE(vp.at(net) == val);
    }

    // moving onto itself changes nothing
    TrojanSpec same;
    same.label = "noop-move";
    same.patches.push_back({PatchKind::MoveRouteThru, "SLICE_X1Y1.A6LUT", "SLICE_X1Y1.A6LUT"});
    CHECK(apply_patch(cfg, same) == cfg);

    // no route-thru at an unused slice
    TrojanSpec bad;
    bad.label = "bad-move";
    bad.patches.push_back({PatchKind::MoveRouteThru, "SLICE_X3Y2.A6LUT", "SLICE_X4Y0.A6LUT"});
    CHECK_THROWS_AS((void)apply_patch(cfg, bad), ArgumentError);
}

TEST_CASE("gen_trit_tc: six gates occupy six previously unused LUTs, dormant") {
    FabricConfig cfg = host();
    int base_used = used_luts(cfg);
    TrojanSpec spec = gen_trit_tc(cfg, 6, 42);
    FabricConfig patched = apply_patch(cfg, spec);
    CHECK(validate(patched).empty());
    CHECK(used_luts(patched) == base_used + 6);
    CHECK(used_ffs(patched) == used_ffs(cfg));
    CHECK(verify_dormant(cfg, spec));

    // identical spec for the same seed, different placement across seeds
    CHECK(gen_trit_tc(cfg, 6, 42) == spec);
    CHECK(!(gen_trit_tc(cfg, 6, 43) == spec));
}

TEST_CASE("gen_trit_tc is dormant for many seeds") {
    FabricConfig cfg = host();
    for (uint64_t seed = 0; seed < 25; ++seed)
        CHECK(verify_dormant(cfg, gen_trit_tc(cfg, 6, seed)));
}

TEST_CASE("gen_trit_tc needs spare LUTs and a route to splice") {
    FabricConfig tiny = make_demo(Family::SeriesK, 3, 2, "route-thru");
    CHECK_THROWS_AS((void)gen_trit_tc(tiny, 1000, 1), ArgumentError);
    FabricConfig no_routes = make_blank_config(Family::SeriesK, 2, 2);
    no_routes.pins.push_back({"p", true});
    CHECK_THROWS_AS((void)gen_trit_tc(no_routes, 6, 1), ArgumentError);
}

TEST_CASE("gen_trit_ts: a 15-state counter takes 4 FFs plus 5 LUTs") {
    FabricConfig cfg = host();
    TrojanSpec spec = gen_trit_ts(cfg, 15, 7);
    FabricConfig patched = apply_patch(cfg, spec);
    CHECK(validate(patched).empty());
    CHECK(used_ffs(patched) == used_ffs(cfg) + 4);
    CHECK(used_luts(patched) == used_luts(cfg) + 5);

    // all counter FFs hold zero with the clock stopped
    int zeroed = 0;
    for (const auto& t : patched.tiles)
        for (const auto& sl : t.slices)
            for (const auto& ff : sl.ffs)
                if (ff.used && !ff_at(cfg, sl.name + "." + ff.name).used) {
                    CHECK(!ff.state);
                    ++zeroed;
                }
    CHECK(zeroed == 4);

    CHECK(verify_dormant(cfg, spec));
    CHECK_NOTHROW(build_netlist(patched));  // acyclic through the FF boundary
    CHECK(gen_trit_ts(cfg, 15, 7) == spec);
}

TEST_CASE("counter increment logic is correct when clocked by hand") {
    FabricConfig cfg = host();
    FabricConfig patched = apply_patch(cfg, gen_trit_ts(cfg, 15, 3));

    // collect counter FFs in bit order via their q nets
    std::vector<FFConfig*> ffs(4, nullptr);
    std::string trig_net;
    for (auto& t : patched.tiles)
        for (auto& sl : t.slices) {
            for (auto& ff : sl.ffs)
                if (ff.used && ff.q_net.find("_q") != std::string::npos)
                    for (int b = 0; b < 4; ++b)
                        if (ff.q_net.substr(ff.q_net.size() - 2) == detail::format("q%d", b))
                            ffs[b] = &ff;
            for (auto& lut : sl.luts)
                if (lut.used && lut.output_net.find("_trig") != std::string::npos)
                    trig_net = lut.output_net;
        }
    for (auto* ff : ffs) REQUIRE(ff != nullptr);
    REQUIRE(!trig_net.empty());

    int fired_at = -1;
    for (int step = 0; step < 16; ++step) {
        NodeValues vals = evaluate_logic(build_netlist(patched), patched);
        int count = 0;
        for (int b = 0; b < 4; ++b) count |= (ffs[b]->state ? 1 : 0) << b;
        CHECK(count == step);
        if (vals.at(trig_net)) fired_at = count;
        if (step == 15) break;
        for (int b = 0; b < 4; ++b) ffs[b]->state = vals.at(ffs[b]->d_net);
    }
    CHECK(fired_at == 14);  // terminal count of a 15-state counter
}

TEST_CASE("trojan specs round-trip through their file format") {
    FabricConfig cfg = host();
    for (TrojanSpec spec : {gen_trit_tc(cfg, 6, 5), gen_trit_ts(cfg, 15, 5),
                            builtin_trojan(cfg, "ff-toggle:SLICE_X0Y1.AFF", 0)}) {
        std::string text = serialize_trojan_spec(spec);
        CHECK(parse_trojan_spec(text) == spec);
    }
    CHECK_THROWS_AS((void)parse_trojan_spec("patch set_init target=x payload=y\n"), ParseError);
}

TEST_CASE("builtin trojans: init-flip checks the before value") {
    FabricConfig cfg = make_demo(Family::SeriesK, 6, 4, "lut-init-pair");
    TrojanSpec spec =
        builtin_trojan(cfg, "init-flip:SLICE_X1Y1.D6LUT:0x00008000:0x00010000", 0);
    FabricConfig patched = apply_patch(cfg, spec);
    CHECK(lut_at(patched, "SLICE_X1Y1.D6LUT").init == LutInit::from_hex("0x00010000", 6));
    CHECK(changed_elements(cfg, patched) == std::set<std::string>{"SLICE_X1Y1.D6LUT"});

    CHECK_THROWS_AS(
        (void)builtin_trojan(cfg, "init-flip:SLICE_X1Y1.D6LUT:0x00001000:0x00010000", 0),
        ArgumentError);
    CHECK_THROWS_AS((void)builtin_trojan(cfg, "who-knows:1", 0), ArgumentError);
}

TEST_CASE("every generated spec leaves the patched config valid") {
    FabricConfig cfg = host();
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        CHECK(validate(apply_patch(cfg, gen_trit_tc(cfg, 6, seed))).empty());
        CHECK(validate(apply_patch(cfg, gen_trit_ts(cfg, 15, seed))).empty());
    }
}

TEST_CASE("gate_init truth tables") {
    // AND2 on a 4-input LUT: only indices with both low bits set
    LutInit and2 = gate_init(GateFn::And, 2, 4);
    for (int i = 0; i < 16; ++i) CHECK(and2.bit(i) == ((i & 3) == 3));
    LutInit nor3 = gate_init(GateFn::Nor, 3, 4);
    for (int i = 0; i < 16; ++i) CHECK(nor3.bit(i) == ((i & 7) == 0));
    LutInit not1 = gate_init(GateFn::Not, 1, 6);
    for (int i = 0; i < 64; ++i) CHECK(not1.bit(i) == ((i & 1) == 0));
    CHECK_THROWS_AS((void)gate_init(GateFn::And, 7, 6), ArgumentError);
}
