#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "llsi/fabric.hpp"
#include "llsi/floorplan.hpp"

namespace llsi {

enum class PatchKind {
    SetInit,
    SetPin,
    SetFfState,
    SetRoute,
    AddRouteThru,
    MoveRouteThru,
    AddGates,
    AddCounter,
};

std::string patch_kind_name(PatchKind k);
PatchKind patch_kind_from_name(std::string_view name);

/// One declarative edit.  `target` is a cell display name
/// ("SLICE_X1Y1.D6LUT", "SBOX(0,1)"), a net id for set_pin, or "-" when the
/// payload carries its own cell list.  Payload syntax per kind:
///   set_init        <hex>
///   set_pin         <0|1>
///   set_ff_state    <0|1>
///   set_route       <src>-><sink>:<0|1>       (1 adds, 0 removes)
///   add_route_thru  <src>-><sink>
///   move_route_thru <to-cell>
///   add_gates       <FN>@<cell>:<in,...>-><out>[;...]
///   add_counter     <n>@ff=<cell,...>;ns=<cell,...>;trig=<cell>
struct Patch {
    PatchKind kind;
    std::string target;
    std::string payload;
    bool operator==(const Patch&) const = default;
};

struct TrojanSpec {
    std::string label;
    std::vector<Patch> patches;
    bool operator==(const TrojanSpec&) const = default;
};

enum class GateFn { And, Or, Nand, Nor, Xor, Not };
std::string gate_fn_name(GateFn f);
GateFn gate_fn_from_name(std::string_view name);

struct GateDef {
    GateFn fn = GateFn::And;
    std::vector<std::string> inputs;
    std::string output;
    std::string lut_cell;  // display name of the LUT implementing the gate
};

/// Truth table for `fn` over the first n_inputs selector bits, extended to
/// the LUT arity (higher selectors are don't-care).
LutInit gate_init(GateFn fn, int n_inputs, int arity);

/// Applies every patch in order to a copy of cfg; the result passes
/// validate().  Throws when a patch targets an unknown cell, allocates a
/// used element, or carries a malformed payload.
FabricConfig apply_patch(const FabricConfig& cfg, const TrojanSpec& spec);

/// Configures the unused LUT at `at` as identity-on-input-0 fed by `source`
/// and re-routes the existing direct route source->sink through it.
TrojanSpec add_route_thru(const FabricConfig& cfg, const CellRef& at,
                          const std::string& source, const std::string& sink);

/// Relocates a route-thru LUT, moving its output route to the new tile.
TrojanSpec move_route_thru(const FabricConfig& cfg, const CellRef& from, const CellRef& to);

/// Combinational benchmark: n_gates gates on previously unused LUTs forming
/// a rare trigger tree over existing nets; the last gate XORs the trigger
/// into one re-routed victim signal.  Deterministic per seed.
TrojanSpec gen_trit_tc(const FabricConfig& cfg, int n_gates, uint64_t seed);

/// Sequential benchmark: a binary up-counter with n_states states
/// (ceil(log2(n_states+1)) FFs plus next-state LUTs) and a terminal-count
/// trigger LUT.  All FFs start at 0.  Deterministic per seed.
TrojanSpec gen_trit_ts(const FabricConfig& cfg, int n_states, uint64_t seed);

/// True when applying the spec leaves every net of the original design at
/// its original value (clock halted, default pins).
bool verify_dormant(const FabricConfig& cfg, const TrojanSpec& spec);

/// "trit-tc:6", "trit-ts:15", "init-flip:<cell>:<from>:<to>",
/// "ff-toggle:<cell>", "route-thru-add:<cell>:<src>:<sink>",
/// "route-thru-move:<from>:<to>".
TrojanSpec builtin_trojan(const FabricConfig& cfg, const std::string& text, uint64_t seed);

TrojanSpec parse_trojan_spec(std::string_view text);
std::string serialize_trojan_spec(const TrojanSpec& spec);
TrojanSpec load_trojan_spec(const std::string& path);
void save_trojan_spec(const TrojanSpec& spec, const std::string& path);

} // namespace llsi
