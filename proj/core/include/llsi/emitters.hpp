#pragma once

#include <string>
#include <vector>

#include "llsi/floorplan.hpp"
#include "llsi/netlist.hpp"

namespace llsi {

enum class DeviceKind { PassTransistor, ConfigCell, FfCore, Buffer };

std::string device_kind_name(DeviceKind k);
DeviceKind device_kind_from_name(std::string_view name);

/// Modulation amplitude per (device kind, conducting, value), arbitrary
/// units.  A conducting channel always responds more strongly than a
/// non-conducting one of the same kind.
class ResponseTable {
public:
    /// pass_transistor 1.0/0.25, config_cell 0.6/0.4, ff_core 0.9/0.5,
    /// buffer 0.7/0.45 (conducting/non-conducting).
    static ResponseTable defaults();

    /// Defaults overridden by `kind conducting value amplitude` rows.
    static ResponseTable from_text(std::string_view text);
    static ResponseTable load(const std::string& path);

    double amplitude(DeviceKind kind, bool conducting, bool value) const {
        return amp_[(int)kind][conducting][value];
    }
    void set(DeviceKind kind, bool conducting, bool value, double amplitude);

    /// Throws unless all amplitudes are >= 0 and conducting beats
    /// non-conducting for every kind and value.
    void check() const;

private:
    double amp_[4][2][2] = {};
};

struct Emitter {
    double x = 0, y = 0;  // um
    DeviceKind kind = DeviceKind::ConfigCell;
    bool conducting = false;
    bool value = false;
    double amplitude = 0;
    CellRef origin;
};

using EmitterMap = std::vector<Emitter>;

/// Expands the evaluated logic state into point emitters:
///  - every LUT contributes one config-cell emitter per truth-table bit
///    (all zero for unused LUTs),
///  - used LUTs add a pass-transistor pair per internal mux,
///  - used FFs add a core and an output-buffer emitter keyed to the state,
///  - enabled routes add a pass transistor and buffer keyed to the carried
///    value.
EmitterMap expand_emitters(const FabricConfig& cfg, const NodeValues& values,
                           const ResponseTable& table, const FloorPlan& fp);

} // namespace llsi
