#pragma once

// Shared helpers for the test suites: a randomized-but-valid config
// generator and small filesystem utilities.

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "llsi/demos.hpp"
#include "llsi/fabric.hpp"

namespace testsup {

using namespace llsi;

/// Random valid design: some pins, then used LUTs/FFs wired layer by layer so
/// every net has exactly one driver and the combinational part stays acyclic.
inline FabricConfig random_config(Family family, int cols, int rows, uint64_t seed,
                                  int n_routes = 8, int n_luts = -1, int n_ffs = -1) {
    std::mt19937_64 rng(seed);
    FabricConfig cfg = make_blank_config(family, cols, rows, "random");

    std::vector<std::string> driven = {"0", "1"};
    int n_pins = 2 + int(rng() % 4);
    for (int i = 0; i < n_pins; ++i) {
        std::string net = "p" + std::to_string(i);
        cfg.pins.push_back({net, (rng() & 1) != 0});
        driven.push_back(net);
    }

    auto rand_net = [&]() { return driven[rng() % driven.size()]; };

    if (n_ffs < 0) n_ffs = 1 + int(rng() % 4);
    for (int i = 0; i < n_ffs; ++i) {
        Tile& t = cfg.tiles[rng() % cfg.tiles.size()];
        Slice& sl = t.slices[rng() % t.slices.size()];
        FFConfig& ff = sl.ffs[rng() % sl.ffs.size()];
        if (ff.used) continue;
        ff.used = true;
        ff.state = (rng() & 1) != 0;
        ff.d_net = rand_net();
        ff.q_net = "q" + std::to_string(i);
        driven.push_back(ff.q_net);
    }

    if (n_luts < 0) n_luts = 2 + int(rng() % 6);
    for (int i = 0; i < n_luts; ++i) {
        Tile& t = cfg.tiles[rng() % cfg.tiles.size()];
        Slice& sl = t.slices[rng() % t.slices.size()];
        LUTConfig& lut = sl.luts[rng() % sl.luts.size()];
        if (lut.used) continue;
        lut.used = true;
        lut.init = {rng() & ((lut.arity >= 6) ? ~0ull : ((1ull << (1 << lut.arity)) - 1)),
                    1 << lut.arity};
        for (auto& in : lut.input_nets) in = rand_net();
        lut.output_net = "w" + std::to_string(i);
        driven.push_back(lut.output_net);
    }

    for (int i = 0; i < n_routes; ++i) {
        Tile& t = cfg.tiles[rng() % cfg.tiles.size()];
        if ((int)t.switchbox.routes.size() >= t.switchbox.capacity) continue;
        std::string sink = "r" + std::to_string(i);
        t.switchbox.routes.push_back({rand_net(), sink});
        driven.push_back(sink);
    }

    std::sort(cfg.pins.begin(), cfg.pins.end());
    for (auto& t : cfg.tiles) std::sort(t.switchbox.routes.begin(), t.switchbox.routes.end());
    return cfg;
}

/// Unique scratch directory under the system temp dir, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("llsiscope-" + tag + "-" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace testsup
