#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "llsi/common.hpp"

namespace llsi {

// Synthetic configurable-fabric model for two device families:
//   SeriesK - slice-based fabric, 2 slices per tile, each slice holding
//             four 6-input LUTs and eight flip-flops.
//   SeriesP - cluster-based fabric, 1 logic cluster per tile holding
//             twelve elements of one 4-input LUT plus one flip-flop.
// Net-ids are opaque strings; "0" and "1" are reserved constant nets.

enum class Family { SeriesK, SeriesP };

std::string family_name(Family f);
Family family_from_name(std::string_view name);

struct FamilyTraits {
    int slices_per_tile;
    int luts_per_slice;
    int ffs_per_slice;
    int lut_arity;
};
const FamilyTraits& family_traits(Family f);

std::string slice_name(Family f, int tile_col, int tile_row, int slice_index);
std::string lut_name(Family f, int lut_index);
std::string ff_name(Family f, int ff_index);

/// LUT truth table: bit i is the output for selector index i, where
/// index = sum over inputs of input_j * 2^j (input 0 the least significant).
struct LutInit {
    uint64_t bits = 0;
    int width = 0;  // number of table entries, 2^arity when well formed

    bool bit(int i) const { return (bits >> i) & 1u; }
    std::string to_hex() const;
    static LutInit from_hex(std::string_view hex, int arity);
    bool operator==(const LutInit&) const = default;
};

struct LUTConfig {
    std::string name;
    int arity = 0;
    LutInit init;
    std::vector<std::string> input_nets;  // length == arity; unused inputs tied to "0"
    std::string output_net;               // empty when none
    bool used = false;

    bool operator==(const LUTConfig&) const = default;
};

struct FFConfig {
    std::string name;
    bool state = false;  // the clock-halted stored value
    std::string d_net;
    std::string q_net;  // empty when none
    bool used = false;

    bool operator==(const FFConfig&) const = default;
};

struct Route {
    std::string src;
    std::string sink;
    auto operator<=>(const Route&) const = default;
};

struct SwitchBox {
    std::vector<Route> routes;  // kept sorted; no sink appears twice
    int capacity = 64;

    bool operator==(const SwitchBox&) const = default;
};

struct Slice {
    std::string name;
    std::vector<LUTConfig> luts;
    std::vector<FFConfig> ffs;

    bool operator==(const Slice&) const = default;
};

struct Tile {
    int col = 0;
    int row = 0;
    std::vector<Slice> slices;
    SwitchBox switchbox;

    bool operator==(const Tile&) const = default;
};

struct Pin {
    std::string net;
    bool value = false;
    auto operator<=>(const Pin&) const = default;
};

struct FabricConfig {
    Family family = Family::SeriesK;
    int grid_cols = 0;
    int grid_rows = 0;
    std::vector<Tile> tiles;
    std::vector<Pin> pins;
    std::string name;

    bool operator==(const FabricConfig&) const = default;
};

/// All-unused fabric with every tile/slice/element present and defaulted.
FabricConfig make_blank_config(Family family, int grid_cols, int grid_rows,
                               std::string name = {});

enum class ViolationKind {
    BadGrid,
    DuplicateTile,
    TileOutOfBounds,
    BadSliceCount,
    BadSliceName,
    BadElementCount,
    BadElementName,
    BadArity,
    BadInitWidth,
    MissingOutput,
    ReservedNet,
    MultiplyDrivenNet,
    UndrivenNet,
    DuplicateRouteSink,
    RouteCapacityExceeded,
};

struct Violation {
    ViolationKind kind;
    std::string entity;   // the offending slice/element/net/tile name
    std::string message;  // human-readable detail
};

/// Structural invariant check.  Violations are data, not errors; an empty
/// result means the config is valid.
std::vector<Violation> validate(const FabricConfig& cfg);

/// Parses the line-oriented fabric-config format (see docs/fabric-format.md).
/// Throws ParseError on syntax/schema problems and InvariantError when the
/// parsed document violates a model invariant.
FabricConfig parse_fabric_config(std::string_view text);

/// Canonical, byte-stable rendering; parse(serialize(cfg)) == cfg.
std::string serialize_fabric_config(const FabricConfig& cfg);

FabricConfig load_fabric_config(const std::string& path);
void save_fabric_config(const FabricConfig& cfg, const std::string& path);

// ---- element addressing ----------------------------------------------

/// Position of an element inside a config, as indices into the vectors.
struct ElementIndex {
    int tile = -1;
    int slice = -1;   // -1 for switchboxes
    int element = -1; // lut/ff index within the slice
    enum class Kind { Lut, Ff, SwitchBox } kind = Kind::Lut;
};

/// Resolves "SLICE_X1Y1.D6LUT", "LC(2,1).LUT3", "SLICE_X0Y0.AFF" or
/// "SBOX(0,1)" against a config.  Returns nothing when absent.
std::optional<ElementIndex> find_element(const FabricConfig& cfg, std::string_view name);

std::string element_display_name(const FabricConfig& cfg, const ElementIndex& idx);

/// True if the net id is one of the reserved constants "0" / "1".
inline bool is_const_net(std::string_view net) { return net == "0" || net == "1"; }

} // namespace llsi
