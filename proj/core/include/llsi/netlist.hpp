#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "llsi/fabric.hpp"

namespace llsi {

/// The clock is halted, so evaluation is purely combinational: pins and FF
/// q-nets are sources, LUTs and routes propagate.
struct NetDriver {
    enum class Kind { Const, Pin, Lut, Ff, Route } kind = Kind::Const;
    bool const_value = false;   // Const / Pin
    int tile = -1;              // Lut / Ff / Route
    int slice = -1;             // Lut / Ff
    int element = -1;           // Lut / Ff
    std::string route_src;      // Route
};

struct Netlist {
    std::vector<std::string> nets;                       // every net, sorted
    std::unordered_map<std::string, NetDriver> drivers;  // undriven nets absent
    std::vector<std::string> topo_order;                 // combinational order
};

/// Thrown when LUTs and routes form a cycle that is not broken by an FF.
class CombinationalLoopError : public Error {
public:
    CombinationalLoopError(std::string what, std::vector<std::string> cycle)
        : Error(std::move(what)), cycle_nets(std::move(cycle)) {}
    std::vector<std::string> cycle_nets;
};

Netlist build_netlist(const FabricConfig& cfg);

using NodeValues = std::unordered_map<std::string, bool>;

/// Truth-table lookup: returns init bit at index sum(inputs[i] * 2^i).
/// init.width must equal 2^inputs.size().
bool lut_eval(const LutInit& init, std::span<const bool> inputs);

/// One internal 2:1 mux of a LUT's selection tree.  Level-l muxes all select
/// by input l; level 0 chooses between adjacent truth-table bits.
struct MuxState {
    int level = 0;
    int index = 0;
    bool select = false;
    bool in0 = false;
    bool in1 = false;
    bool out = false;
};

struct MuxTreeState {
    std::vector<MuxState> muxes;  // level-major, 2^arity - 1 entries
    bool root = false;            // equals lut_eval on the same inputs
};

MuxTreeState lut_mux_states(const LutInit& init, std::span<const bool> inputs);

/// Assigns every net: pins and FF states are sources, LUT outputs come from
/// lut_eval, routed sinks copy their source.  Throws on undriven nets that a
/// used element depends on.
NodeValues evaluate_logic(const Netlist& nl, const FabricConfig& cfg);

} // namespace llsi
