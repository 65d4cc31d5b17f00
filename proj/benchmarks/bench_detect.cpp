#include <benchmark/benchmark.h>

#include "llsi/demos.hpp"
#include "llsi/detect.hpp"
#include "llsi/netlist.hpp"
#include "llsi/render.hpp"

using namespace llsi;

namespace {

struct ComparePair {
    FloorPlan fp;
    Image16 golden, suspect;

    explicit ComparePair(int px) : fp(build_floorplan(make_demo(Family::SeriesK, 6, 4,
                                                                "route-thru"))) {
        FabricConfig cfg = make_demo(Family::SeriesK, 6, 4, "route-thru");
        ScanParams scan;
        scan.region_w = px * 0.25;
        scan.region_h = px * 0.25;
        EmitterMap em = expand_emitters(cfg, evaluate_logic(build_netlist(cfg), cfg),
                                        ResponseTable::defaults(), fp);
        NoiseParams n1;
        n1.seed = 1;
        NoiseParams n2;
        n2.seed = 2;
        golden = render_llsi(em, scan, n1);
        suspect = render_llsi(em, scan, n2);
    }
};

const ComparePair& pair512() {
    static ComparePair p(512);
    return p;
}

} // namespace

static void BM_RegisterImages(benchmark::State& state) {
    const auto& p = pair512();
    int max_shift = (int)state.range(0);
    for (auto _ : state) {
        Registration reg = register_images(p.golden, p.suspect, max_shift);
        benchmark::DoNotOptimize(reg.dx);
    }
}
BENCHMARK(BM_RegisterImages)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_Despeckle(benchmark::State& state) {
    ImageF img = pair512().golden.to_float();
    for (auto _ : state) {
        ImageF out = despeckle(img);
        benchmark::DoNotOptimize(out.v.data());
    }
}
BENCHMARK(BM_Despeckle)->Unit(benchmark::kMillisecond);

static void BM_CompareSnapshots(benchmark::State& state) {
    const auto& p = pair512();
    for (auto _ : state) {
        CompareResult res = compare_snapshots(p.golden, p.suspect, p.fp, AnalysisParams{});
        benchmark::DoNotOptimize(res.report.verdict);
    }
}
BENCHMARK(BM_CompareSnapshots)->Unit(benchmark::kMillisecond);
