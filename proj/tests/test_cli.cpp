#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "llsi/detect.hpp"
#include "llsi/fabric.hpp"
#include "llsi/image.hpp"
#include "support.hpp"

using namespace llsi;

namespace {

int run(const std::string& args) {
    std::string cmd = std::string(LLSISCOPE_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int count_used_luts(const FabricConfig& cfg) {
    int n = 0;
    for (const auto& t : cfg.tiles)
        for (const auto& sl : t.slices)
            for (const auto& lut : sl.luts) n += lut.used;
    return n;
}

} // namespace

TEST_CASE("fabricgen writes a valid config with its manifest") {
    testsup::TempDir tmp("fabricgen");
    std::string out = tmp.file("design.cfg");
    REQUIRE(run("fabricgen --family seriesk --grid 6x4 --demo route-thru --out " + out) == 0);
    FabricConfig cfg = load_fabric_config(out);
    CHECK(validate(cfg).empty());
    auto rt = find_element(cfg, "SLICE_X1Y1.A6LUT");
    REQUIRE(rt.has_value());
    CHECK(cfg.tiles[rt->tile].slices[rt->slice].luts[rt->element].used);
    CHECK(slurp(out + ".manifest").find("command=fabricgen") == 0);

    CHECK(run("fabricgen --grid 0x4 --out " + tmp.file("bad.cfg")) == 1);
    CHECK(run("fabricgen --demo bogus --out " + tmp.file("bad2.cfg")) == 1);
}

TEST_CASE("inject applies builtins and writes the patched config") {
    testsup::TempDir tmp("inject");
    std::string base = tmp.file("base.cfg");
    REQUIRE(run("fabricgen --grid 6x4 --demo route-thru --out " + base) == 0);
    FabricConfig golden = load_fabric_config(base);

    std::string tc = tmp.file("tc.cfg");
    REQUIRE(run("inject --in " + base + " --trojan trit-tc:6 --seed 3 --out " + tc +
                " --spec-out " + tmp.file("tc.trojan")) == 0);
    FabricConfig tc_cfg = load_fabric_config(tc);
    CHECK(count_used_luts(tc_cfg) == count_used_luts(golden) + 6);

    std::string ts = tmp.file("ts.cfg");
    REQUIRE(run("inject --in " + base + " --trojan trit-ts:15 --seed 3 --out " + ts) == 0);
    FabricConfig ts_cfg = load_fabric_config(ts);
    CHECK(count_used_luts(ts_cfg) == count_used_luts(golden) + 5);

    CHECK(run("inject --in " + base + " --trojan bogus:1 --out " + tmp.file("x.cfg")) == 1);

    std::string pair = tmp.file("pair.cfg");
    REQUIRE(run("fabricgen --grid 6x4 --demo lut-init-pair --out " + pair) == 0);
    std::string flipped = tmp.file("flipped.cfg");
    REQUIRE(run("inject --in " + pair +
                " --trojan init-flip:SLICE_X1Y1.D6LUT:0x00008000:0x00010000 --out " + flipped) ==
            0);
    FabricConfig f = load_fabric_config(flipped);
    auto idx = find_element(f, "SLICE_X1Y1.D6LUT");
    CHECK(f.tiles[idx->tile].slices[idx->slice].luts[idx->element].init ==
          LutInit::from_hex("0x00010000", 6));
}

TEST_CASE("render records the scan defaults and scales with modulation") {
    testsup::TempDir tmp("render");
    std::string cfg = tmp.file("d.cfg");
    REQUIRE(run("fabricgen --grid 3x2 --demo route-thru --out " + cfg) == 0);

    REQUIRE(run("render --in " + cfg + " --seed 5 --out-prefix " + tmp.file("a")) == 0);
    Image16 a = read_pgm(tmp.file("a.llsi.pgm"));
    CHECK(a.scan.dwell_ms_per_px == 3.3);
    CHECK(a.scan.bandpass_hz == 100.0);
    CHECK(a.scan.modulation.peak_to_peak_v == 0.2);
    CHECK(a.kind == ImageKind::Llsi);
    Image16 refl = read_pgm(tmp.file("a.refl.pgm"));
    CHECK(refl.kind == ImageKind::Reflectance);
    CHECK(refl.width == a.width);

    // same seed renders identical bytes
    REQUIRE(run("render --in " + cfg + " --seed 5 --out-prefix " + tmp.file("b")) == 0);
    CHECK(slurp(tmp.file("a.llsi.pgm")) == slurp(tmp.file("b.llsi.pgm")));

    // lower peak-to-peak modulation lowers the integrated signal linearly
    REQUIRE(run("render --in " + cfg + " --noise-floor 0 --mod-vpp 0.20 --out-prefix " +
                tmp.file("hi")) == 0);
    REQUIRE(run("render --in " + cfg + " --noise-floor 0 --mod-vpp 0.15 --out-prefix " +
                tmp.file("lo")) == 0);
    Image16 hi = read_pgm(tmp.file("hi.llsi.pgm"));
    Image16 lo = read_pgm(tmp.file("lo.llsi.pgm"));
    double sum_hi = 0, sum_lo = 0;
    for (size_t i = 0; i < hi.pixels.size(); ++i) sum_hi += hi.dequant(i);
    for (size_t i = 0; i < lo.pixels.size(); ++i) sum_lo += lo.dequant(i);
    CHECK(sum_lo / sum_hi == doctest::Approx(0.75).epsilon(0.01));

    CHECK(run("render --in " + cfg + " --pitch-um -1 --out-prefix " + tmp.file("x")) == 1);

    // a custom response table changes the rendered signal
    std::ofstream table(tmp.file("table.txt"));
    table << "pass_transistor 1 0 2.0\npass_transistor 1 1 2.0\n";
    table.close();
    REQUIRE(run("render --in " + cfg + " --noise-floor 0 --response-table " +
                tmp.file("table.txt") + " --out-prefix " + tmp.file("boost")) == 0);
    CHECK(slurp(tmp.file("boost.llsi.pgm")) != slurp(tmp.file("hi.llsi.pgm")));
    CHECK(run("render --in " + cfg + " --response-table /nonexistent --out-prefix " +
              tmp.file("y")) == 1);
}

TEST_CASE("compare: exit codes encode the verdict") {
    testsup::TempDir tmp("compare");
    std::string cfg = tmp.file("d.cfg");
    REQUIRE(run("fabricgen --grid 6x4 --demo route-thru --out " + cfg) == 0);
    REQUIRE(run("render --in " + cfg + " --seed 1 --out-prefix " + tmp.file("golden")) == 0);
    REQUIRE(run("render --in " + cfg + " --seed 2 --out-prefix " + tmp.file("again")) == 0);

    // golden vs golden, different seeds: CLEAN, exit 0
    CHECK(run("compare --golden " + tmp.file("golden.llsi.pgm") + " --suspect " +
              tmp.file("again.llsi.pgm") + " --floorplan " + cfg + " --out-prefix " +
              tmp.file("clean")) == 0);
    CHECK(slurp(tmp.file("clean.report.txt")).find("verdict: CLEAN") == 0);

    // golden vs sequential trojan: TAMPERED, exit 2
    std::string ts = tmp.file("ts.cfg");
    REQUIRE(run("inject --in " + cfg + " --trojan trit-ts:15 --seed 4 --out " + ts) == 0);
    REQUIRE(run("render --in " + ts + " --seed 3 --out-prefix " + tmp.file("suspect")) == 0);
    CHECK(run("compare --golden " + tmp.file("golden.llsi.pgm") + " --suspect " +
              tmp.file("suspect.llsi.pgm") + " --floorplan " + cfg + " --out-prefix " +
              tmp.file("hit")) == 2);
    std::string report = slurp(tmp.file("hit.report.txt"));
    CHECK(report.find("verdict: TAMPERED") == 0);
    CHECK(report.find("component:") != std::string::npos);
    CHECK(slurp(tmp.file("hit.overlay.ppm")).substr(0, 2) == "P6");

    // mismatched pixel pitch: error, exit 1
    REQUIRE(run("render --in " + cfg + " --seed 1 --pitch-um 0.5 --out-prefix " +
                tmp.file("coarse")) == 0);
    CHECK(run("compare --golden " + tmp.file("golden.llsi.pgm") + " --suspect " +
              tmp.file("coarse.llsi.pgm") + " --floorplan " + cfg + " --out-prefix " +
              tmp.file("bad")) == 1);
}

TEST_CASE("rerun from a manifest reproduces outputs byte for byte") {
    testsup::TempDir tmp("rerun");
    std::string cfg = tmp.file("d.cfg");
    REQUIRE(run("fabricgen --grid 3x2 --demo ff-toggle-pair --out " + cfg) == 0);
    REQUIRE(run("render --in " + cfg + " --seed 8 --out-prefix " + tmp.file("g")) == 0);

    std::string toggled = tmp.file("t.cfg");
    REQUIRE(run("inject --in " + cfg + " --trojan ff-toggle:SLICE_X0Y1.DFF --out " + toggled) ==
            0);
    REQUIRE(run("render --in " + toggled + " --seed 9 --out-prefix " + tmp.file("s")) == 0);

    int rc = run("compare --golden " + tmp.file("g.llsi.pgm") + " --suspect " +
                 tmp.file("s.llsi.pgm") + " --floorplan " + cfg + " --out-prefix " +
                 tmp.file("cmp"));
    CHECK(rc == 2);
    std::string report = slurp(tmp.file("cmp.report.txt"));
    std::string overlay = slurp(tmp.file("cmp.overlay.ppm"));

    // rerun the comparison from its manifest alone
    CHECK(run("rerun --manifest " + tmp.file("cmp.manifest")) == 2);
    CHECK(slurp(tmp.file("cmp.report.txt")) == report);
    CHECK(slurp(tmp.file("cmp.overlay.ppm")) == overlay);

    // render, fabricgen and inject reruns are also bit-identical
    std::string g_llsi = slurp(tmp.file("g.llsi.pgm"));
    CHECK(run("rerun --manifest " + tmp.file("g.manifest")) == 0);
    CHECK(slurp(tmp.file("g.llsi.pgm")) == g_llsi);

    std::string cfg_bytes = slurp(cfg);
    CHECK(run("rerun --manifest " + cfg + ".manifest") == 0);
    CHECK(slurp(cfg) == cfg_bytes);

    std::string toggled_bytes = slurp(toggled);
    CHECK(run("rerun --manifest " + toggled + ".manifest") == 0);
    CHECK(slurp(toggled) == toggled_bytes);
}
