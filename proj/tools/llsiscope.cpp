// llsiscope: generate synthetic fabric designs, inject trojan patches,
// render laser-probing snapshots, and compare golden vs. suspect images.
//
// Exit status: 0 on success (and CLEAN verdicts), 2 when a comparison ends
// TAMPERED, 1 on any error.

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "llsi/demos.hpp"
#include "llsi/detect.hpp"
#include "llsi/emitters.hpp"
#include "llsi/netlist.hpp"
#include "llsi/render.hpp"
#include "llsi/trojan.hpp"
#include "manifest.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using namespace llsi;
using tool::RunManifest;

struct FabricgenOpts {
    std::string family = "seriesk";
    std::string grid = "6x4";
    std::string demo = "blank";
    std::string name;
    std::string out;
};

std::pair<int, int> parse_grid(const std::string& grid) {
    int cols = 0, rows = 0;
    if (std::sscanf(grid.c_str(), "%dx%d", &cols, &rows) != 2 || cols < 1 || rows < 1)
        throw ArgumentError("grid must be <cols>x<rows> with positive sizes, got '" + grid + "'");
    return {cols, rows};
}

int run_fabricgen(const FabricgenOpts& o) {
    auto [cols, rows] = parse_grid(o.grid);
    FabricConfig cfg = make_demo(family_from_name(o.family), cols, rows, o.demo, o.name);
    save_fabric_config(cfg, o.out);

    RunManifest m;
    m.set("command", "fabricgen");
    m.set("tool-version", kVersion);
    m.set("family", o.family);
    m.set("grid", o.grid);
    m.set("demo", o.demo);
    m.set("name", o.name);
    m.set("out", o.out);
    m.save(o.out + ".manifest");
    std::printf("wrote %s (%s, %s, demo %s)\n", o.out.c_str(), o.family.c_str(), o.grid.c_str(),
                o.demo.c_str());
    return 0;
}

struct InjectOpts {
    std::string in;
    std::string trojan;
    uint64_t seed = 1;
    std::string out;
    std::string spec_out;
};

int run_inject(const InjectOpts& o) {
    FabricConfig cfg = load_fabric_config(o.in);
    TrojanSpec spec;
    if (std::filesystem::exists(o.trojan))
        spec = load_trojan_spec(o.trojan);
    else
        spec = builtin_trojan(cfg, o.trojan, o.seed);

    FabricConfig patched = apply_patch(cfg, spec);
    bool dormant = verify_dormant(cfg, spec);
    save_fabric_config(patched, o.out);
    if (!o.spec_out.empty()) save_trojan_spec(spec, o.spec_out);

    RunManifest m;
    m.set("command", "inject");
    m.set("tool-version", kVersion);
    m.set("in", o.in);
    m.set("trojan", o.trojan);
    m.set("seed", o.seed);
    m.set("out", o.out);
    m.set("spec-out", o.spec_out);
    m.save(o.out + ".manifest");
    std::printf("wrote %s (%s, %zu patch(es), %s)\n", o.out.c_str(), spec.label.c_str(),
                spec.patches.size(), dormant ? "dormant" : "NOT dormant");
    return 0;
}

struct RenderOpts {
    std::string in;
    std::string out_prefix;
    std::string region;  // "x0,y0,w,h" in um; empty = full fabric
    double pitch_um = 0.25;
    double tile_pitch_um = kDefaultTilePitchUm;
    double wavelength_um = 1.3;
    double na = 0.71;
    double dwell_ms = 3.3;
    double bandpass_hz = 100.0;
    double mod_vpp = 0.2;
    double mod_offset_v = 1.0;
    double mod_freq_hz = 80e3;
    double noise_floor = 5e-4;
    double ref_dwell_ms = 3.3;
    double ref_bandpass_hz = 100.0;
    double drift_gain_slope = 0.0;
    double drift_blur_um = 0.0;
    uint64_t seed = 1;
    int workers = 0;
    std::string response_table;
};

int run_render(const RenderOpts& o) {
    FabricConfig cfg = load_fabric_config(o.in);
    FloorPlan fp = build_floorplan(cfg, o.tile_pitch_um);

    ScanParams scan;
    scan.pixel_pitch_um = o.pitch_um;
    if (o.region.empty()) {
        Rect e = fp.extent();
        scan.region_x0 = e.x0;
        scan.region_y0 = e.y0;
        scan.region_w = e.width();
        scan.region_h = e.height();
    } else {
        if (std::sscanf(o.region.c_str(), "%lf,%lf,%lf,%lf", &scan.region_x0, &scan.region_y0,
                        &scan.region_w, &scan.region_h) != 4)
            throw ArgumentError("region must be x0,y0,w,h in um");
    }
    scan.wavelength_um = o.wavelength_um;
    scan.numerical_aperture = o.na;
    scan.dwell_ms_per_px = o.dwell_ms;
    scan.bandpass_hz = o.bandpass_hz;
    scan.modulation = {o.mod_offset_v, o.mod_vpp, o.mod_freq_hz};
    scan.check();

    NoiseParams noise;
    noise.noise_floor = o.noise_floor;
    noise.ref_dwell_ms = o.ref_dwell_ms;
    noise.ref_bandpass_hz = o.ref_bandpass_hz;
    noise.focus_drift = {o.drift_gain_slope, o.drift_blur_um};
    noise.seed = o.seed;

    ResponseTable table =
        o.response_table.empty() ? ResponseTable::defaults() : ResponseTable::load(o.response_table);

    Netlist nl = build_netlist(cfg);
    NodeValues values = evaluate_logic(nl, cfg);
    EmitterMap em = expand_emitters(cfg, values, table, fp);

    Image16 llsi = render_llsi(em, scan, noise, o.workers);
    Image16 refl = render_reflectance(fp, scan, o.workers);
    write_pgm(llsi, o.out_prefix + ".llsi.pgm");
    write_pgm(refl, o.out_prefix + ".refl.pgm");

    RunManifest m;
    m.set("command", "render");
    m.set("tool-version", kVersion);
    m.set("in", o.in);
    m.set("out-prefix", o.out_prefix);
    m.set("region", o.region);
    m.set("pitch-um", o.pitch_um);
    m.set("tile-pitch-um", o.tile_pitch_um);
    m.set("wavelength-um", o.wavelength_um);
    m.set("na", o.na);
    m.set("dwell-ms", o.dwell_ms);
    m.set("bandpass-hz", o.bandpass_hz);
    m.set("mod-vpp", o.mod_vpp);
    m.set("mod-offset-v", o.mod_offset_v);
    m.set("mod-freq-hz", o.mod_freq_hz);
    m.set("noise-floor", o.noise_floor);
    m.set("ref-dwell-ms", o.ref_dwell_ms);
    m.set("ref-bandpass-hz", o.ref_bandpass_hz);
    m.set("drift-gain-slope", o.drift_gain_slope);
    m.set("drift-blur-um", o.drift_blur_um);
    m.set("seed", o.seed);
    m.set("response-table", o.response_table);
    m.save(o.out_prefix + ".manifest");
    std::printf("wrote %s.llsi.pgm and %s.refl.pgm (%dx%d px, %zu emitters)\n",
                o.out_prefix.c_str(), o.out_prefix.c_str(), llsi.width, llsi.height, em.size());
    return 0;
}

struct CompareOpts {
    std::string golden;
    std::string suspect;
    std::string floorplan;
    std::string out_prefix;
    std::string reflectance;
    double k = 5.0;
    int min_area = 0;
    int max_shift = 10;
    bool no_despeckle = false;
    double tile_pitch_um = kDefaultTilePitchUm;
};

int run_compare(const CompareOpts& o) {
    Image16 golden = read_pgm(o.golden);
    Image16 suspect = read_pgm(o.suspect);
    FabricConfig cfg = load_fabric_config(o.floorplan);
    FloorPlan fp = build_floorplan(cfg, o.tile_pitch_um);

    AnalysisParams params;
    params.z_threshold = o.k;
    params.min_area_px = o.min_area;
    params.max_shift_px = o.max_shift;
    params.despeckle = !o.no_despeckle;

    CompareResult res = compare_snapshots(golden, suspect, fp, params, o.golden, o.suspect);

    Image16 refl;
    if (!o.reflectance.empty())
        refl = read_pgm(o.reflectance);
    else
        refl = render_reflectance(fp, golden.scan);
    if (refl.width != golden.width || refl.height != golden.height)
        throw Error("reflectance image dimensions do not match the snapshots");

    write_report(res.report, o.out_prefix + ".report.txt");
    write_ppm(render_overlay(refl, res.diff, res.sigma, params), o.out_prefix + ".overlay.ppm");

    RunManifest m;
    m.set("command", "compare");
    m.set("tool-version", kVersion);
    m.set("golden", o.golden);
    m.set("suspect", o.suspect);
    m.set("floorplan", o.floorplan);
    m.set("out-prefix", o.out_prefix);
    m.set("reflectance", o.reflectance);
    m.set("k", o.k);
    m.set("min-area", o.min_area);
    m.set("max-shift", o.max_shift);
    m.set("despeckle", params.despeckle ? 1 : 0);
    m.set("tile-pitch-um", o.tile_pitch_um);
    m.save(o.out_prefix + ".manifest");

    bool tampered = res.report.verdict == Verdict::Tampered;
    std::printf("%s: %zu component(s), report %s.report.txt\n",
                tampered ? "TAMPERED" : "CLEAN", res.report.components.size(),
                o.out_prefix.c_str());
    return tampered ? 2 : 0;
}

int run_rerun(const std::string& manifest_path) {
    RunManifest m = RunManifest::load(manifest_path);
    std::string command = m.get("command");
    if (command == "fabricgen") {
        FabricgenOpts o;
        o.family = m.get("family");
        o.grid = m.get("grid");
        o.demo = m.get("demo");
        o.name = m.get_or("name", "");
        o.out = m.get("out");
        return run_fabricgen(o);
    }
    if (command == "inject") {
        InjectOpts o;
        o.in = m.get("in");
        o.trojan = m.get("trojan");
        o.seed = std::stoull(m.get("seed"));
        o.out = m.get("out");
        o.spec_out = m.get_or("spec-out", "");
        return run_inject(o);
    }
    if (command == "render") {
        RenderOpts o;
        o.in = m.get("in");
        o.out_prefix = m.get("out-prefix");
        o.region = m.get_or("region", "");
        o.pitch_um = std::stod(m.get("pitch-um"));
        o.tile_pitch_um = std::stod(m.get("tile-pitch-um"));
        o.wavelength_um = std::stod(m.get("wavelength-um"));
        o.na = std::stod(m.get("na"));
        o.dwell_ms = std::stod(m.get("dwell-ms"));
        o.bandpass_hz = std::stod(m.get("bandpass-hz"));
        o.mod_vpp = std::stod(m.get("mod-vpp"));
        o.mod_offset_v = std::stod(m.get("mod-offset-v"));
        o.mod_freq_hz = std::stod(m.get("mod-freq-hz"));
        o.noise_floor = std::stod(m.get("noise-floor"));
        o.ref_dwell_ms = std::stod(m.get("ref-dwell-ms"));
        o.ref_bandpass_hz = std::stod(m.get("ref-bandpass-hz"));
        o.drift_gain_slope = std::stod(m.get("drift-gain-slope"));
        o.drift_blur_um = std::stod(m.get("drift-blur-um"));
        o.seed = std::stoull(m.get("seed"));
        o.response_table = m.get_or("response-table", "");
        return run_render(o);
    }
    if (command == "compare") {
        CompareOpts o;
        o.golden = m.get("golden");
        o.suspect = m.get("suspect");
        o.floorplan = m.get("floorplan");
        o.out_prefix = m.get("out-prefix");
        o.reflectance = m.get_or("reflectance", "");
        o.k = std::stod(m.get("k"));
        o.min_area = std::stoi(m.get("min-area"));
        o.max_shift = std::stoi(m.get("max-shift"));
        o.no_despeckle = m.get("despeckle") == "0";
        o.tile_pitch_um = std::stod(m.get("tile-pitch-um"));
        return run_compare(o);
    }
    throw Error("manifest has unknown command '" + command + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale laser logic state imaging simulator and "
                 "golden-vs-suspect tamper detector"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("llsiscope ") + kVersion);

    FabricgenOpts fg;
    auto* fabricgen = app.add_subcommand("fabricgen", "Generate a fabric config");
    fabricgen->add_option("--family", fg.family, "Device family: seriesk or seriesp")
        ->capture_default_str();
    fabricgen->add_option("--grid", fg.grid, "Tile grid <cols>x<rows>")->capture_default_str();
    fabricgen->add_option("--demo", fg.demo,
                          "Demo design: blank, route-thru, ff-toggle-pair, lut-init-pair")
        ->capture_default_str();
    fabricgen->add_option("--name", fg.name, "Design name label");
    fabricgen->add_option("--out", fg.out, "Output config path")->required();

    InjectOpts in;
    auto* inject = app.add_subcommand("inject", "Apply a trojan spec to a config");
    inject->add_option("--in", in.in, "Input fabric config")->required();
    inject->add_option("--trojan", in.trojan,
                       "Spec file path or builtin (trit-tc:<n>, trit-ts:<n>, "
                       "init-flip:<cell>:<from>:<to>, ff-toggle:<cell>, "
                       "route-thru-add:<cell>:<src>:<sink>, route-thru-move:<from>:<to>)")
        ->required();
    inject->add_option("--seed", in.seed, "Generator seed")->capture_default_str();
    inject->add_option("--out", in.out, "Patched config path")->required();
    inject->add_option("--spec-out", in.spec_out, "Also write the generated spec here");

    RenderOpts rd;
    auto* render = app.add_subcommand("render", "Render snapshot images of a config");
    render->add_option("--in", rd.in, "Fabric config")->required();
    render->add_option("--out-prefix", rd.out_prefix,
                       "Output prefix for <prefix>.llsi.pgm / <prefix>.refl.pgm")
        ->required();
    render->add_option("--region", rd.region, "Scan region x0,y0,w,h in um (default: full fabric)");
    render->add_option("--pitch-um", rd.pitch_um, "Pixel pitch in um")->capture_default_str();
    render->add_option("--tile-pitch-um", rd.tile_pitch_um, "Tile pitch in um")
        ->capture_default_str();
    render->add_option("--wavelength-um", rd.wavelength_um, "Laser wavelength in um")
        ->capture_default_str();
    render->add_option("--na", rd.na, "Numerical aperture")->capture_default_str();
    render->add_option("--dwell-ms", rd.dwell_ms, "Pixel dwell time in ms")
        ->capture_default_str();
    render->add_option("--bandpass-hz", rd.bandpass_hz, "Lock-in bandpass in Hz")
        ->capture_default_str();
    render->add_option("--mod-vpp", rd.mod_vpp, "Supply modulation peak-to-peak in V")
        ->capture_default_str();
    render->add_option("--mod-offset-v", rd.mod_offset_v, "Supply offset in V")
        ->capture_default_str();
    render->add_option("--mod-freq-hz", rd.mod_freq_hz, "Modulation frequency in Hz")
        ->capture_default_str();
    render->add_option("--noise-floor", rd.noise_floor,
                       "Per-pixel noise sigma at the reference dwell/bandpass")
        ->capture_default_str();
    render->add_option("--ref-dwell-ms", rd.ref_dwell_ms, "Reference dwell for the noise floor")
        ->capture_default_str();
    render->add_option("--ref-bandpass-hz", rd.ref_bandpass_hz,
                       "Reference bandpass for the noise floor")
        ->capture_default_str();
    render->add_option("--drift-gain-slope", rd.drift_gain_slope,
                       "Relative gain drift over one scan")
        ->capture_default_str();
    render->add_option("--drift-blur-um", rd.drift_blur_um,
                       "Extra blur sigma reached at the last row, in um")
        ->capture_default_str();
    render->add_option("--seed", rd.seed, "Noise seed")->capture_default_str();
    render->add_option("--workers", rd.workers, "Worker threads (0 = auto)")
        ->capture_default_str();
    render->add_option("--response-table", rd.response_table,
                       "Device response table file (kind conducting value amplitude)");

    CompareOpts cp;
    auto* compare = app.add_subcommand("compare", "Compare a golden and a suspect snapshot");
    compare->add_option("--golden", cp.golden, "Golden LLSI image")->required();
    compare->add_option("--suspect", cp.suspect, "Suspect LLSI image")->required();
    compare->add_option("--floorplan", cp.floorplan, "Fabric config for cell mapping")
        ->required();
    compare->add_option("--out-prefix", cp.out_prefix,
                        "Output prefix for <prefix>.report.txt / <prefix>.overlay.ppm")
        ->required();
    compare->add_option("--reflectance", cp.reflectance,
                        "Reflectance base image (default: rendered from the floorplan)");
    compare->add_option("--k", cp.k, "Z-score threshold")->capture_default_str();
    compare->add_option("--min-area", cp.min_area,
                        "Minimum component area in px (0 = PSF footprint)")
        ->capture_default_str();
    compare->add_option("--max-shift", cp.max_shift, "Registration search radius in px")
        ->capture_default_str();
    compare->add_flag("--no-despeckle", cp.no_despeckle, "Skip the 3x3 median filter");
    compare->add_option("--tile-pitch-um", cp.tile_pitch_um, "Tile pitch in um")
        ->capture_default_str();

    std::string manifest_path;
    auto* rerun = app.add_subcommand("rerun", "Re-execute a command from its manifest");
    rerun->add_option("--manifest", manifest_path, "Manifest file")->required();

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(fabricgen)) return run_fabricgen(fg);
        if (app.got_subcommand(inject)) return run_inject(in);
        if (app.got_subcommand(render)) return run_render(rd);
        if (app.got_subcommand(compare)) return run_compare(cp);
        if (app.got_subcommand(rerun)) return run_rerun(manifest_path);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
