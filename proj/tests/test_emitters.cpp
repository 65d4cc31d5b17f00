#include <doctest.h>

#include <map>
#include <set>

#include "llsi/demos.hpp"
#include "llsi/emitters.hpp"
#include "support.hpp"

using namespace llsi;

namespace {

struct Setup {
    FabricConfig cfg;
    FloorPlan fp;
    ResponseTable table = ResponseTable::defaults();
    EmitterMap em;

    explicit Setup(FabricConfig c) : cfg(std::move(c)), fp(build_floorplan(cfg)) {
        em = expand_emitters(cfg, evaluate_logic(build_netlist(cfg), cfg), table, fp);
    }
};

int count_kind(const EmitterMap& em, DeviceKind k) {
    int n = 0;
    for (const auto& e : em) n += e.kind == k;
    return n;
}

} // namespace

TEST_CASE("response table defaults satisfy the conducting ordering") {
    ResponseTable t = ResponseTable::defaults();
    CHECK_NOTHROW(t.check());
    CHECK(t.amplitude(DeviceKind::PassTransistor, true, false) == 1.0);
    CHECK(t.amplitude(DeviceKind::PassTransistor, false, true) == 0.25);
    CHECK(t.amplitude(DeviceKind::ConfigCell, true, true) == 0.6);
    CHECK(t.amplitude(DeviceKind::ConfigCell, false, false) == 0.4);
    CHECK(t.amplitude(DeviceKind::FfCore, true, true) == 0.9);
    CHECK(t.amplitude(DeviceKind::Buffer, false, false) == 0.45);
}

TEST_CASE("response table file rows override defaults; bad tables are rejected") {
    ResponseTable t = ResponseTable::from_text("# tweak\npass_transistor 1 0 1.5\n");
    CHECK(t.amplitude(DeviceKind::PassTransistor, true, false) == 1.5);
    CHECK(t.amplitude(DeviceKind::PassTransistor, true, true) == 1.0);

    CHECK_THROWS_AS((void)ResponseTable::from_text("config_cell 1 0 0.1\nconfig_cell 0 0 0.2\n"),
                    InvariantError);
    CHECK_THROWS_AS((void)ResponseTable::from_text("bogus 1 0 1.0\n"), ParseError);
}

TEST_CASE("fully unused seriesk slice emits only the config-cell baseline") {
    Setup s(make_blank_config(Family::SeriesK, 1, 1));
    // 2 slices x 4 LUTs x 64 bits, nothing else
    CHECK(s.em.size() == 2 * 4 * 64);
    for (const auto& e : s.em) {
        CHECK(e.kind == DeviceKind::ConfigCell);
        CHECK(!e.conducting);
        CHECK(e.amplitude == 0.4);
    }
}

TEST_CASE("a used 6-input LUT adds 63 mux emitter pairs") {
    FabricConfig cfg = make_blank_config(Family::SeriesK, 1, 1);
    cfg.pins.push_back({"a", true});
    LUTConfig& lut = cfg.tiles[0].slices[0].luts[0];
    lut.used = true;
    lut.init = route_thru_init(6);
    lut.input_nets[0] = "a";
    lut.output_net = "y";
    Setup s(std::move(cfg));
    CHECK(count_kind(s.em, DeviceKind::PassTransistor) == 2 * 63);
    CHECK(count_kind(s.em, DeviceKind::ConfigCell) == 2 * 4 * 64);
}

TEST_CASE("used FF emits core and buffer keyed to its state") {
    FabricConfig cfg = make_blank_config(Family::SeriesP, 1, 1);
    FFConfig& ff = cfg.tiles[0].slices[0].ffs[2];
    ff.used = true;
    ff.state = true;
    ff.d_net = "0";
    ff.q_net = "q";
    Setup s(std::move(cfg));
    CHECK(count_kind(s.em, DeviceKind::FfCore) == 1);
    CHECK(count_kind(s.em, DeviceKind::Buffer) == 1);
    for (const auto& e : s.em)
        if (e.kind == DeviceKind::FfCore) {
            CHECK(e.conducting);
            CHECK(e.amplitude == 0.9);
            CHECK(e.origin.display() == "LC(0,0).FF2");
        }
}

TEST_CASE("routes emit an always-on pass transistor plus a value-keyed buffer") {
    FabricConfig cfg = make_blank_config(Family::SeriesK, 1, 1);
    cfg.pins.push_back({"hi", true});
    cfg.pins.push_back({"lo", false});
    cfg.tiles[0].switchbox.routes = {{"hi", "s1"}, {"lo", "s2"}};
    Setup s(std::move(cfg));
    CHECK(count_kind(s.em, DeviceKind::PassTransistor) == 2);
    std::multiset<double> buffer_amps;
    for (const auto& e : s.em) {
        if (e.kind == DeviceKind::PassTransistor) {
            CHECK(e.conducting);
            CHECK(e.amplitude == 1.0);
        }
        if (e.kind == DeviceKind::Buffer) buffer_amps.insert(e.amplitude);
    }
    CHECK(buffer_amps == std::multiset<double>{0.45, 0.7});
}

TEST_CASE("emitter amplitudes always come from the response table") {
    Setup s(make_demo(Family::SeriesK, 6, 4, "route-thru"));
    for (const auto& e : s.em)
        CHECK(e.amplitude == s.table.amplitude(e.kind, e.conducting, e.value));
}

TEST_CASE("every emitter position maps back to its originating cell") {
    Setup s(make_demo(Family::SeriesK, 6, 4, "route-thru"));
    for (const auto& e : s.em) {
        auto cell = floorplan_lookup(s.fp, e.x, e.y);
        REQUIRE(cell.has_value());
        CHECK(*cell == e.origin);
    }
}

TEST_CASE("emitter maps are deterministic") {
    FabricConfig cfg = make_demo(Family::SeriesK, 6, 4, "ff-toggle-pair");
    Setup a(cfg), b(cfg);
    REQUIRE(a.em.size() == b.em.size());
    for (size_t i = 0; i < a.em.size(); ++i) {
        CHECK(a.em[i].x == b.em[i].x);
        CHECK(a.em[i].amplitude == b.em[i].amplitude);
        CHECK(a.em[i].conducting == b.em[i].conducting);
    }
}

TEST_CASE("toggling one FF changes only emitters at the FF and downstream of it") {
    FabricConfig golden = make_demo(Family::SeriesK, 6, 4, "ff-toggle-pair");
    FabricConfig toggled = golden;
    auto idx = find_element(toggled, "SLICE_X0Y1.DFF");
    REQUIRE(idx.has_value());
    toggled.tiles[idx->tile].slices[idx->slice].ffs[idx->element].state = true;

    Setup a(golden), b(toggled);
    REQUIRE(a.em.size() == b.em.size());

    // downstream closure computed independently: nets whose value changed
    NodeValues va = evaluate_logic(build_netlist(golden), golden);
    NodeValues vb = evaluate_logic(build_netlist(toggled), toggled);
    std::set<std::string> changed_nets;
    for (const auto& [net, v] : va)
        if (vb.at(net) != v) changed_nets.insert(net);
    CHECK(changed_nets.count("ff_d") == 1);

    std::set<std::string> allowed;
    allowed.insert("SLICE_X0Y1.DFF");
    for (const auto& t : golden.tiles)
        for (const auto& sl : t.slices)
            for (const auto& lut : sl.luts)
                if (lut.used)
                    for (const auto& in : lut.input_nets)
                        if (changed_nets.count(in)) allowed.insert(sl.name + "." + lut.name);

    for (size_t i = 0; i < a.em.size(); ++i) {
        bool same = a.em[i].conducting == b.em[i].conducting && a.em[i].value == b.em[i].value &&
                    a.em[i].amplitude == b.em[i].amplitude;
        if (!same) CHECK(allowed.count(a.em[i].origin.display()) == 1);
    }
}

TEST_CASE("init patch with unchanged output stays inside the LUT rectangle") {
    FabricConfig golden = make_demo(Family::SeriesK, 6, 4, "lut-init-pair");
    FabricConfig patched = golden;
    auto idx = find_element(patched, "SLICE_X1Y1.D6LUT");
    REQUIRE(idx.has_value());
    LUTConfig& lut = patched.tiles[idx->tile].slices[idx->slice].luts[idx->element];
    CHECK(lut.init.to_hex() == "0x0000000000008000");
    lut.init = LutInit::from_hex("0x00010000", 6);

    // all inputs are 0, so the output bit (index 0) is unchanged
    NodeValues va = evaluate_logic(build_netlist(golden), golden);
    NodeValues vb = evaluate_logic(build_netlist(patched), patched);
    for (const auto& [net, v] : va) CHECK(vb.at(net) == v);

    Setup a(golden), b(patched);
    REQUIRE(a.em.size() == b.em.size());
    const Rect& rect = a.fp.find("SLICE_X1Y1.D6LUT")->rect;
    int changed = 0;
    for (size_t i = 0; i < a.em.size(); ++i) {
        bool same = a.em[i].conducting == b.em[i].conducting && a.em[i].value == b.em[i].value &&
                    a.em[i].amplitude == b.em[i].amplitude;
        if (!same) {
            ++changed;
            CHECK(rect.contains(a.em[i].x, a.em[i].y));
        }
    }
    CHECK(changed > 0);
}
