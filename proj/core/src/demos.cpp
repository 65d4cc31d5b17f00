#include "llsi/demos.hpp"

#include <algorithm>

namespace llsi {

std::vector<std::string> demo_names() {
    return {"blank", "route-thru", "ff-toggle-pair", "lut-init-pair"};
}

LutInit route_thru_init(int arity) {
    // output = input 0: table bit i is set exactly when bit 0 of i is set
    uint64_t bits = 0xaaaaaaaaaaaaaaaaull;
    int width = 1 << arity;
    if (width < 64) bits &= (1ull << width) - 1;
    return {bits, width};
}

namespace {

struct Access {
    FabricConfig& cfg;

    Tile& tile(int col, int row) {
        for (auto& t : cfg.tiles)
            if (t.col == col && t.row == row) return t;
        throw ArgumentError(detail::format("tile (%d,%d) not in grid", col, row));
    }
    LUTConfig& lut(int col, int row, int slice, int index) {
        return tile(col, row).slices.at(slice).luts.at(index);
    }
    FFConfig& ff(int col, int row, int slice, int index) {
        return tile(col, row).slices.at(slice).ffs.at(index);
    }
};

// XOR of inputs 0 and 1, remaining selectors ignored.
LutInit xor2_init(int arity) {
    uint64_t bits = 0;
    for (int i = 0; i < (1 << arity); ++i)
        if (((i & 1) ^ ((i >> 1) & 1)) != 0) bits |= 1ull << i;
    return {bits, 1 << arity};
}

// AND of inputs 0 and 1.
LutInit and2_init(int arity) {
    uint64_t bits = 0;
    for (int i = 0; i < (1 << arity); ++i)
        if ((i & 3) == 3) bits |= 1ull << i;
    return {bits, 1 << arity};
}

void use_lut(LUTConfig& lut, LutInit init, std::vector<std::string> ins, std::string out) {
    lut.init = init;
    lut.input_nets = std::move(ins);
    while ((int)lut.input_nets.size() < lut.arity) lut.input_nets.push_back("0");
    lut.output_net = std::move(out);
    lut.used = true;
}

void use_ff(FFConfig& ff, bool state, std::string d, std::string q) {
    ff.state = state;
    ff.d_net = std::move(d);
    ff.q_net = std::move(q);
    ff.used = true;
}

// Source FF in the slice-0 column of tile (0,1), route-thru LUT in the
// second slice column of tile (0,1), consumer back in tile (0,1) slice 0.
// For SeriesK this puts the route-thru at SLICE_X1Y1 with source and
// destination logic in SLICE_X0Y1.
void build_route_thru(FabricConfig& cfg) {
    Access a{cfg};
    const auto& tr = family_traits(cfg.family);
    int rt_slice = tr.slices_per_tile > 1 ? 1 : 0;
    int rt_lut = tr.slices_per_tile > 1 ? 0 : 1;

    cfg.pins.push_back({"p_en", true});
    use_ff(a.ff(0, 1, 0, 0), true, "sig_out", "sig_src");
    use_lut(a.lut(0, 1, rt_slice, rt_lut), route_thru_init(tr.lut_arity), {"sig_src"},
            "sig_rt");
    a.tile(0, 1).switchbox.routes.push_back({"sig_rt", "sig_dst"});
    use_lut(a.lut(0, 1, 0, 0), and2_init(tr.lut_arity), {"sig_dst", "p_en"}, "sig_out");
}

void build_ff_toggle_pair(FabricConfig& cfg) {
    Access a{cfg};
    const auto& tr = family_traits(cfg.family);
    int lut_slice = tr.slices_per_tile > 1 ? 1 : 0;
    int dff = std::min(3, tr.ffs_per_slice - 1);

    use_ff(a.ff(0, 1, 0, 0), false, "0", "ff_a");
    use_ff(a.ff(0, 1, 0, dff), false, "lut_out", "ff_d");
    int lut_idx = std::min(3, tr.luts_per_slice - 1);
    use_lut(a.lut(0, 1, lut_slice, lut_idx), xor2_init(tr.lut_arity), {"ff_a", "ff_d"},
            "lut_out");
}

void build_lut_init_pair(FabricConfig& cfg) {
    Access a{cfg};
    const auto& tr = family_traits(cfg.family);
    int lut_slice = tr.slices_per_tile > 1 ? 1 : 0;
    int lut_idx = std::min(3, tr.luts_per_slice - 1);

    int pins = std::min(5, tr.lut_arity);
    std::vector<std::string> ins;
    for (int i = 0; i < pins; ++i) {
        std::string net = detail::format("i%d", i);
        cfg.pins.push_back({net, false});
        ins.push_back(net);
    }
    // bit 15 set: output is 1 only for selector index 15
    LutInit init{0x8000ull, 1 << tr.lut_arity};
    use_lut(a.lut(0, 1, lut_slice, lut_idx), init, ins, "lut_o");
}

} // namespace

FabricConfig make_demo(Family family, int grid_cols, int grid_rows, const std::string& demo,
                       std::string name) {
    FabricConfig cfg = make_blank_config(family, grid_cols, grid_rows,
                                         name.empty() ? demo : name);
    if (demo == "blank") {
        // nothing to add
    } else if (demo == "route-thru") {
        if (grid_cols < 3 || grid_rows < 2)
            throw ArgumentError("route-thru demo needs a grid of at least 3x2");
        build_route_thru(cfg);
    } else if (demo == "ff-toggle-pair") {
        if (grid_rows < 2) throw ArgumentError("ff-toggle-pair demo needs a grid of at least 1x2");
        build_ff_toggle_pair(cfg);
    } else if (demo == "lut-init-pair") {
        if (grid_rows < 2) throw ArgumentError("lut-init-pair demo needs a grid of at least 1x2");
        build_lut_init_pair(cfg);
    } else {
        throw ArgumentError("unknown demo '" + demo + "'");
    }
    for (auto& t : cfg.tiles) std::sort(t.switchbox.routes.begin(), t.switchbox.routes.end());
    std::sort(cfg.pins.begin(), cfg.pins.end());
    auto violations = validate(cfg);
    if (!violations.empty())
        throw Error("demo '" + demo + "' produced an invalid config: " + violations[0].entity +
                    ": " + violations[0].message);
    return cfg;
}

} // namespace llsi
