#pragma once

#include <vector>

#include "iab/netmodel.hpp"
#include "iab/solver.hpp"

namespace iab {

// multipliers for the per-UE rate floor (lambda), per-relay backhaul
// capacity (mu) and the serve-at-least-one-relay coupling (nu)
struct DualState {
  VecX lambda;  // indexed by UE offset i - (B+1)
  VecX mu;      // indexed by SBS id - 1
  double nu = 1.0;

  static DualState ones(int B, int K);
};

struct AssocResult {
  MatX y;
  DualState duals;
  std::vector<double> dual_trace;  // dual objective per subgradient iteration
  int iters = 0;
};

// per-link throughput at the current allocation: sum_m x * rate
MatX effective_rates(const GainTable& gains, const Tensor3& x, const MatX& P,
                     const ScenarioConfig& cfg);

// Lagrangian coefficient of each candidate association edge. Invalid slots
// (self pairs, column 0) are set far below any attainable score.
MatX assoc_scores(const MatX& rhat, const DualState& d, int B, int K);

// argmax parent per node; ties prefer the hub, then the lowest id.
// pins[i] >= 0 forces node i's parent; pass an empty vector for all-free.
MatX select_parents(const MatX& scores, const std::vector<int>& pins, int B);

// restore hub reachability: guarantee one relay on the hub and break any
// parent cycles by re-attaching their best hub-edge member
void repair_tree(MatX& y, const MatX& scores, const std::vector<int>& pins, int B);

double dual_objective(const MatX& scores, const MatX& y, const DualState& d, double min_rate);

// one projected-subgradient update with diminishing step a/(b+t), t from 1
void subgradient_step(DualState& d, const MatX& y, const MatX& rhat, const ScenarioConfig& cfg,
                      int t);

AssocResult run_association(const GainTable& gains, const Tensor3& x, const MatX& P,
                            const ScenarioConfig& cfg,
                            const std::vector<int>& pins = {});

}  // namespace iab
