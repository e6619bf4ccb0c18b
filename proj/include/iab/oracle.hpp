#pragma once

#include "iab/channel.hpp"
#include "iab/config.hpp"
#include "iab/netmodel.hpp"

namespace iab {

struct OracleResult {
  Solution sol;
  double objective = 0.0;
};

// Brute force over every tree-feasible association, every shareable binary
// allocation, and a uniform per-entry power grid with `power_levels` points
// from 0 to each budget. Only usable at toy sizes; throws when the enumeration
// would exceed 1e8 combinations or nothing feasible exists.
OracleResult exhaustive_solve(const GainTable& gains, const ScenarioConfig& cfg, int power_levels);

// Coordinate-wise hill climb of the powers on a step grid, holding y and x
// fixed; keeps feasibility and never lowers the objective.
Solution grid_refine(const GainTable& gains, const Solution& sol, const ScenarioConfig& cfg,
                     double step_w);

}  // namespace iab
