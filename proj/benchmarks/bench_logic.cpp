#include <benchmark/benchmark.h>

#include <random>

#include "llsi/demos.hpp"
#include "llsi/netlist.hpp"
#include "llsi/emitters.hpp"
#include "llsi/trojan.hpp"

using namespace llsi;

static void BM_LutMuxStates(benchmark::State& state) {
    std::mt19937_64 rng(1);
    LutInit init{rng(), 64};
    std::array<bool, 6> ins{true, false, true, true, false, true};
    for (auto _ : state) {
        MuxTreeState t = lut_mux_states(init, std::span<const bool>(ins.data(), 6));
        benchmark::DoNotOptimize(t.root);
    }
}
BENCHMARK(BM_LutMuxStates);

static void BM_EvaluateLogic(benchmark::State& state) {
    FabricConfig cfg = make_demo(Family::SeriesK, 6, 4, "route-thru");
    cfg = apply_patch(cfg, gen_trit_ts(cfg, 15, 1));
    Netlist nl = build_netlist(cfg);
    for (auto _ : state) {
        NodeValues vals = evaluate_logic(nl, cfg);
        benchmark::DoNotOptimize(vals.size());
    }
}
BENCHMARK(BM_EvaluateLogic);

static void BM_ExpandEmitters(benchmark::State& state) {
    FabricConfig cfg = make_demo(Family::SeriesK, 6, 4, "route-thru");
    FloorPlan fp = build_floorplan(cfg);
    Netlist nl = build_netlist(cfg);
    NodeValues vals = evaluate_logic(nl, cfg);
    ResponseTable table = ResponseTable::defaults();
    for (auto _ : state) {
        EmitterMap em = expand_emitters(cfg, vals, table, fp);
        benchmark::DoNotOptimize(em.size());
    }
}
BENCHMARK(BM_ExpandEmitters);

static void BM_ParseSerializeRoundTrip(benchmark::State& state) {
    FabricConfig cfg = make_demo(Family::SeriesK, 6, 4, "route-thru");
    std::string text = serialize_fabric_config(cfg);
    for (auto _ : state) {
        FabricConfig back = parse_fabric_config(text);
        benchmark::DoNotOptimize(back.tiles.size());
    }
    state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(text.size()));
}
BENCHMARK(BM_ParseSerializeRoundTrip);
