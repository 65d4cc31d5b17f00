#include "llsi/floorplan.hpp"

#include <cmath>

namespace llsi {

using detail::format;

std::string CellRef::display() const {
    if (element == "SBOX") return format("SBOX(%d,%d)", tile_col, tile_row);
    return slice + "." + element;
}

const DeviceRect& FloorPlan::device(const CellRef& cell) const {
    auto it = by_name_.find(cell.display());
    if (it == by_name_.end()) throw ArgumentError("no device '" + cell.display() + "' in floorplan");
    return devices[it->second];
}

const DeviceRect* FloorPlan::find(const std::string& display_name) const {
    auto it = by_name_.find(display_name);
    return it == by_name_.end() ? nullptr : &devices[it->second];
}

Rect FloorPlan::extent() const {
    return {origin_x, origin_y, origin_x + grid_cols * tile_pitch_um,
            origin_y + grid_rows * tile_pitch_um};
}

namespace {

Rect sub_rect(const Rect& r, double fx0, double fy0, double fx1, double fy1) {
    return {r.x0 + fx0 * r.width(), r.y0 + fy0 * r.height(),
            r.x0 + fx1 * r.width(), r.y0 + fy1 * r.height()};
}

// Slice-internal layout, as fractions of the tile.  The switchbox occupies a
// strip on the left edge of every tile; logic fills the rest.
constexpr double kSboxX0 = 0.02, kSboxX1 = 0.18;
constexpr double kSboxY0 = 0.04, kSboxY1 = 0.96;

void add_series_k(std::vector<DeviceRect>& out, const Tile& tile, const Rect& tile_rect) {
    for (int s = 0; s < (int)tile.slices.size(); ++s) {
        const Slice& sl = tile.slices[s];
        double sx0 = 0.22 + 0.40 * s;
        Rect slice_rect = sub_rect(tile_rect, sx0, 0.04, sx0 + 0.36, 0.96);
        for (int i = 0; i < (int)sl.luts.size(); ++i) {
            Rect r = sub_rect(slice_rect, 0.0, 0.25 * i + 0.015, 0.58, 0.25 * i + 0.235);
            out.push_back({{tile.col, tile.row, sl.name, sl.luts[i].name}, r, DeviceClass::Lut,
                           sl.luts[i].arity});
        }
        for (int i = 0; i < (int)sl.ffs.size(); ++i) {
            Rect r = sub_rect(slice_rect, 0.66, 0.125 * i + 0.012, 0.98, 0.125 * i + 0.113);
            out.push_back({{tile.col, tile.row, sl.name, sl.ffs[i].name}, r, DeviceClass::Ff});
        }
    }
}

void add_series_p(std::vector<DeviceRect>& out, const Tile& tile, const Rect& tile_rect) {
    for (const Slice& sl : tile.slices) {
        Rect cluster = sub_rect(tile_rect, 0.22, 0.04, 0.98, 0.96);
        // 12 logic elements in a 2 x 6 grid; LUT left, FF right inside each
        for (int i = 0; i < (int)sl.luts.size(); ++i) {
            int lcol = i % 2, lrow = i / 2;
            Rect le = sub_rect(cluster, 0.5 * lcol + 0.01, lrow / 6.0 + 0.008,
                               0.5 * lcol + 0.49, (lrow + 1) / 6.0 - 0.008);
            out.push_back({{tile.col, tile.row, sl.name, sl.luts[i].name},
                           sub_rect(le, 0.0, 0.0, 0.60, 1.0), DeviceClass::Lut,
                           sl.luts[i].arity});
            if (i < (int)sl.ffs.size())
                out.push_back({{tile.col, tile.row, sl.name, sl.ffs[i].name},
                               sub_rect(le, 0.68, 0.05, 1.0, 0.95), DeviceClass::Ff});
        }
    }
}

} // namespace

FloorPlan build_floorplan(const FabricConfig& cfg, double tile_pitch_um) {
    if (tile_pitch_um <= 0) throw ArgumentError("tile pitch must be positive");
    FloorPlan fp;
    fp.family = cfg.family;
    fp.tile_pitch_um = tile_pitch_um;
    fp.grid_cols = cfg.grid_cols;
    fp.grid_rows = cfg.grid_rows;

    for (const Tile& tile : cfg.tiles) {
        Rect tr{fp.origin_x + tile.col * tile_pitch_um, fp.origin_y + tile.row * tile_pitch_um,
                fp.origin_x + (tile.col + 1) * tile_pitch_um,
                fp.origin_y + (tile.row + 1) * tile_pitch_um};
        fp.devices.push_back({{tile.col, tile.row, "", "SBOX"},
                              sub_rect(tr, kSboxX0, kSboxY0, kSboxX1, kSboxY1),
                              DeviceClass::SwitchBox});
        if (cfg.family == Family::SeriesK)
            add_series_k(fp.devices, tile, tr);
        else
            add_series_p(fp.devices, tile, tr);
    }
    for (size_t i = 0; i < fp.devices.size(); ++i)
        fp.by_name_[fp.devices[i].cell.display()] = i;
    return fp;
}

std::optional<CellRef> floorplan_lookup(const FloorPlan& fp, double x_um, double y_um) {
    for (const auto& d : fp.devices)
        if (d.rect.contains(x_um, y_um)) return d.cell;
    return std::nullopt;
}

// ---- emitter geometry ----------------------------------------------------

Point config_cell_position(const DeviceRect& lut, int bit_index) {
    int side = lut.lut_arity >= 6 ? 8 : 4;  // 8x8 grid for 64 bits, 4x4 for 16
    int col = bit_index % side, row = bit_index / side;
    const Rect& r = lut.rect;
    return {r.x0 + (col + 0.5) / side * 0.58 * r.width(),
            r.y0 + (row + 0.5) / side * r.height()};
}

Point mux_position(const DeviceRect& lut, int level, int index, int branch) {
    const Rect& r = lut.rect;
    int levels = lut.lut_arity;
    int rows = 1 << (levels - 1 - level);  // muxes at this level
    double x = r.x0 + (0.64 + 0.32 * (level + 0.5) / levels) * r.width();
    double y = r.y0 + (index + 0.5) / rows * r.height();
    return {x + (branch == 0 ? -0.02 : 0.02) * r.width(), y};
}

Point ff_core_position(const DeviceRect& ff) {
    const Rect& r = ff.rect;
    return {r.x0 + 0.30 * r.width(), r.y0 + 0.5 * r.height()};
}

Point ff_buffer_position(const DeviceRect& ff) {
    const Rect& r = ff.rect;
    return {r.x0 + 0.78 * r.width(), r.y0 + 0.5 * r.height()};
}

namespace {

Point route_slot(const DeviceRect& sbox, const Route& route, uint64_t salt) {
    uint64_t h = detail::fnv1a(route.src, detail::fnv1a(route.sink, 0xcbf29ce484222325ull ^ salt));
    double u = double((h >> 0) & 0xffffff) / double(0x1000000);
    double v = double((h >> 24) & 0xffffff) / double(0x1000000);
    const Rect& r = sbox.rect;
    return {r.x0 + (0.06 + 0.88 * u) * r.width(), r.y0 + (0.04 + 0.92 * v) * r.height()};
}

} // namespace

Point route_pass_position(const DeviceRect& sbox, const Route& route) {
    return route_slot(sbox, route, 0x70617373);
}

Point route_buffer_position(const DeviceRect& sbox, const Route& route) {
    return route_slot(sbox, route, 0x62756666);
}

} // namespace llsi
