#pragma once

#include <vector>

#include "llsi/fabric.hpp"

namespace llsi {

// Small ready-made designs used by the CLI and the test scenarios:
//   blank          - every element unused
//   route-thru     - a signal passed through an identity LUT, with source
//                    and destination in fixed slices
//   ff-toggle-pair - two flip-flops feeding a LUT in a neighbouring slice
//   lut-init-pair  - one used LUT with a sparse truth table and pinned inputs
std::vector<std::string> demo_names();

FabricConfig make_demo(Family family, int grid_cols, int grid_rows,
                       const std::string& demo, std::string name = {});

/// Identity-on-input-0 truth table for the given arity (0xaa... pattern).
LutInit route_thru_init(int arity);

} // namespace llsi
