#pragma once

#include "iab/channel.hpp"
#include "iab/config.hpp"
#include "iab/netmodel.hpp"
#include "iab/solver.hpp"

#include <vector>

namespace iab {

// One scheduled link's concave pair. e carries the full received power inside
// the log, q the interference-plus-noise part, so e - q is the weighted link
// rate in bps. Gradients are taken with respect to the power matrix in watts.
struct DcLink {
  int b = 0, i = 0, m = 0;
  double gate = 0.0;  // y * x weight
  double e = 0.0, q = 0.0;
  MatX grad_e, grad_q;  // (B+1) x M
};

std::vector<DcLink> dc_pieces(const GainTable& gains, const MatX& y, const Tensor3& x,
                              const MatX& P, const ScenarioConfig& cfg);

// Sums of the pieces: E - Q is the network sum rate, Ei - Qi user i's rate,
// h1 - h2 a relay's backhaul input minus the load it serves.
struct PaAggregates {
  double E = 0.0, Q = 0.0;
  VecX Ei, Qi;  // per user, index i - B - 1
  VecX h1, h2;  // per node id; meaningful for relays with traffic
};

PaAggregates pa_aggregates(const GainTable& gains, const MatX& y, const Tensor3& x, const MatX& P,
                           const ScenarioConfig& cfg);

// served-user throughput minus the cost of unmet rate floors
double pa_true_objective(const GainTable& gains, const MatX& y, const Tensor3& x, const MatX& P,
                         const ScenarioConfig& cfg);

struct PaResult {
  MatX P;                              // watts; zero on subchannels a BS never uses
  std::vector<double> trace;           // true objective after each accepted step
  std::vector<double> cap_slack_trace; // tightest backhaul row per inner solve
  bool fallback = false;               // some backhaul row had to be dropped
  int iters = 0;
};

PaResult run_pa(const GainTable& gains, const MatX& y, const Tensor3& x, const ScenarioConfig& cfg,
                const MatX* P_init = nullptr);

}  // namespace iab
