#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "llsi/fabric.hpp"

namespace llsi {

/// Addresses one physical device rectangle: a LUT, an FF, or a tile's
/// switchbox ("SBOX").
struct CellRef {
    int tile_col = 0;
    int tile_row = 0;
    std::string slice;    // empty for switchboxes
    std::string element;  // "D6LUT", "AFF", "LUT3", "SBOX", ...

    std::string display() const;
    bool operator==(const CellRef&) const = default;
};

struct Rect {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open [x0,x1) x [y0,y1), in um

    bool contains(double x, double y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
    bool overlaps(const Rect& o) const {
        return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1;
    }
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

enum class DeviceClass { Lut, Ff, SwitchBox };

struct DeviceRect {
    CellRef cell;
    Rect rect;
    DeviceClass cls;
    int lut_arity = 0;  // set for LUT cells
};

/// Deterministic physical layout of a config: one rectangle per LUT, FF and
/// switchbox, tiled on a fixed pitch.  The same config always produces the
/// same floorplan.
struct FloorPlan {
    Family family = Family::SeriesK;
    double tile_pitch_um = 25.0;
    double origin_x = 0.0;
    double origin_y = 0.0;
    int grid_cols = 0;
    int grid_rows = 0;
    std::vector<DeviceRect> devices;

    const DeviceRect& device(const CellRef& cell) const;
    const DeviceRect* find(const std::string& display_name) const;
    Rect extent() const;

private:
    friend FloorPlan build_floorplan(const FabricConfig&, double);
    std::unordered_map<std::string, size_t> by_name_;
};

constexpr double kDefaultTilePitchUm = 25.0;

FloorPlan build_floorplan(const FabricConfig& cfg, double tile_pitch_um = kDefaultTilePitchUm);

/// Cell whose rectangle contains the point, or nothing when the point falls
/// between cells or outside the grid.
std::optional<CellRef> floorplan_lookup(const FloorPlan& fp, double x_um, double y_um);

struct Point {
    double x = 0, y = 0;
};

// Emitter geometry inside device rectangles.  All positions are strictly
// inside the owning rectangle.
Point config_cell_position(const DeviceRect& lut, int bit_index);
Point mux_position(const DeviceRect& lut, int level, int index, int branch);
Point ff_core_position(const DeviceRect& ff);
Point ff_buffer_position(const DeviceRect& ff);
Point route_pass_position(const DeviceRect& sbox, const Route& route);
Point route_buffer_position(const DeviceRect& sbox, const Route& route);

} // namespace llsi
