#include <benchmark/benchmark.h>

#include "llsi/demos.hpp"
#include "llsi/netlist.hpp"
#include "llsi/render.hpp"

using namespace llsi;

namespace {

struct RenderFixture {
    FabricConfig cfg = make_demo(Family::SeriesK, 6, 4, "route-thru");
    FloorPlan fp = build_floorplan(cfg);
    EmitterMap em = expand_emitters(cfg, evaluate_logic(build_netlist(cfg), cfg),
                                    ResponseTable::defaults(), fp);
};

const RenderFixture& fixture() {
    static RenderFixture f;
    return f;
}

ScanParams scan_of(double side_um) {
    ScanParams scan;
    scan.region_w = side_um;
    scan.region_h = side_um;
    return scan;
}

} // namespace

static void BM_RenderLlsi(benchmark::State& state) {
    const auto& f = fixture();
    ScanParams scan = scan_of(double(state.range(0)) * 0.25);
    NoiseParams noise;
    noise.seed = 1;
    int workers = (int)state.range(1);
    for (auto _ : state) {
        Image16 img = render_llsi(f.em, scan, noise, workers);
        benchmark::DoNotOptimize(img.pixels.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_RenderLlsi)
    ->Args({256, 1})
    ->Args({512, 1})
    ->Args({512, 4})
    ->Args({1024, 4})
    ->Unit(benchmark::kMillisecond);

static void BM_RenderReflectance(benchmark::State& state) {
    const auto& f = fixture();
    ScanParams scan = scan_of(double(state.range(0)) * 0.25);
    for (auto _ : state) {
        Image16 img = render_reflectance(f.fp, scan, 1);
        benchmark::DoNotOptimize(img.pixels.data());
    }
}
BENCHMARK(BM_RenderReflectance)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_Quantize(benchmark::State& state) {
    ScanParams scan = scan_of(double(state.range(0)) * 0.25);
    ImageF img(scan.width_px(), scan.height_px());
    for (size_t i = 0; i < img.v.size(); ++i) img.v[i] = double(i % 977) / 977.0;
    for (auto _ : state) {
        Image16 q = quantize_image(img, scan, ImageKind::Llsi, 0.0);
        benchmark::DoNotOptimize(q.pixels.data());
    }
}
BENCHMARK(BM_Quantize)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
