#pragma once

#include <vector>

#include "iab/netmodel.hpp"
#include "iab/solver.hpp"

namespace iab {

// cost multiplier on per-user rate-floor shortfalls inside the stage objectives
constexpr double kQosSlackCost = 4.0;

// Concave minorant of one link-subchannel throughput term x*W*log2(1+sinr)
// around the anchor (x_anchor, interf_anchor). Tight at the anchor; never
// above the true value. Interference arguments are in watts, noise excluded.
double sca_rate_bound(double x, double x_anchor, double sinr_anchor, double interf_w,
                      double interf_anchor_w, double noise_w, double bandwidth_hz);

// mu * sum x(1-x): zero exactly on binary vectors
double binary_penalty(const VecX& x_shares, double mu);

std::vector<int> parents_from(const MatX& y);

// bandwidth * log2(1 + best single-subchannel full-budget SNR); the natural
// rate unit the binary penalty is scaled by
double penalty_scale(const GainTable& gains, const ScenarioConfig& cfg);

struct SaResult {
  Tensor3 x;                           // rounded binary allocation on the tree
  Tensor3 x_frac;                      // final fractional iterate
  std::vector<double> trace;           // true penalized objective, per accepted iterate
  std::vector<double> cap_slack_trace; // min surrogate backhaul slack at each solve output
  double mu_pen = 0.0;
  bool fallback = false;               // some relay's feeder cannot carry its load
  int iters = 0;
};

// true (non-surrogate) stage objective: scheduled user throughput minus the
// binary penalty minus the weighted rate-floor shortfall
double sa_true_objective(const GainTable& gains, const MatX& y, const Tensor3& x, const MatX& P,
                         const ScenarioConfig& cfg, double mu_pen);

// inner-approximation descent on the tree-link subchannel shares at fixed
// association and powers
SaResult run_sa(const GainTable& gains, const MatX& y, const MatX& P, const ScenarioConfig& cfg,
                const Tensor3* x_init = nullptr);

// threshold rounding plus conflict, duplex and backhaul-load repairs
Tensor3 round_allocation(const GainTable& gains, const MatX& y, const Tensor3& x_frac,
                         const MatX& P, const ScenarioConfig& cfg);

}  // namespace iab
