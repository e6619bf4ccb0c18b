#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iab/channel.hpp"
#include "iab/config.hpp"
#include "iab/netmodel.hpp"
#include "iab/solver.hpp"

namespace iab {

enum class Scheme { proposed, sh_max_sinr, mh_max_sinr, sh_prop, direct_access };

const char* scheme_name(Scheme s);
// throws std::invalid_argument on an unknown name
Scheme scheme_from_name(const std::string& name);

// association with every node attached to the hub
MatX direct_access_y(int B, int K);

// attach each node to its best interference-free full-budget SNR parent on a
// reference subchannel; multi_hop lets relays pick any parent, otherwise the
// relay rows are pinned to the hub. The tree is repaired to stay anchored and
// acyclic, so the user rows are identical under both settings.
MatX max_sinr_association(const GainTable& gains, const ScenarioConfig& cfg, bool multi_hop);

// fractional allocation with an equal share on every candidate link, scaled to
// sit inside the relaxed per-cell and duplex rows; seeds association scoring
// so off-tree edges have nonzero throughput estimates
Tensor3 spread_allocation(int B, int K, int M);

// every subchannel gets an equal slice of its cell's power budget
MatX uniform_power(const ScenarioConfig& cfg, int B, int M);

// binary allocation for a tree: links on traffic-carrying paths pick their
// best-gain subchannel, unused subchannels first, then the best reuse that
// keeps the per-cell and duplex rows intact. Links that cannot be placed stay
// unscheduled.
Tensor3 greedy_orthogonal_x(const GainTable& gains, const MatX& y, const ScenarioConfig& cfg);

struct StageTimes {
  double assoc_s = 0.0, sa_s = 0.0, pa_s = 0.0;
};

struct JointResult {
  Solution sol;
  double sum_rate_bps = 0.0;
  double score = 0.0;         // sum rate minus the weighted rate-floor shortfall
  std::vector<double> trace;  // best-so-far sum rate after each stage
  int outer_iters = 0;        // association rounds (joint) or alternation rounds (fixed tree)
  bool converged = false;
  StageTimes times;
};

// subchannel/power alternation at a fixed association tree, keeping the best
// structurally feasible iterate
JointResult alternate_fixed_y(const GainTable& gains, const ScenarioConfig& cfg, const MatX& y,
                              const Tensor3* x0 = nullptr, const MatX* P0 = nullptr);

// three-stage alternation: the direct-access tree is polished first, then
// association, subchannel and power rounds run until the best objective
// stalls. The returned solution is never worse than the direct-access run.
JointResult run_joint(const GainTable& gains, const ScenarioConfig& cfg);

JointResult run_scheme(const GainTable& gains, const ScenarioConfig& cfg, Scheme scheme);

Solution run_baseline(const GainTable& gains, const ScenarioConfig& cfg, Scheme scheme);

// fraction of relay feeder links (resp. user links) whose channel is LoS
double backhaul_los_fraction(const GainTable& gains, const MatX& y);
double access_los_fraction(const GainTable& gains, const MatX& y);

struct TrialResult {
  std::uint64_t seed = 0;  // trial index under the master seed
  Scheme scheme = Scheme::proposed;
  Solution sol;
  double sum_rate_bps = 0.0;
  VecX ue_rates;              // assigned throughput per user
  double backhaul_los = 0.0;
  double access_los = 0.0;
  std::vector<double> trace;
  ConstraintReport report;
  StageTimes times;
  int outer_iters = 0;
  bool converged = false;
};

// one deployment and channel realization per trial, shared by every scheme.
// Trials run concurrently; results are ordered by (trial, scheme). A solution
// that breaks a structural constraint aborts the campaign with diagnostics;
// missed rate floors are reported per trial, not fatal.
std::vector<TrialResult> monte_carlo(const ScenarioConfig& cfg, const std::vector<Scheme>& schemes,
                                     int trials);

enum class SweepAxis { num_ues, min_rate, num_sbs };

const char* axis_name(SweepAxis a);
SweepAxis axis_from_name(const std::string& name);

struct SweepRow {
  double value = 0.0;
  Scheme scheme = Scheme::proposed;
  double mean_bps = 0.0;
  double std_bps = 0.0;  // sample standard deviation
  int n = 0;
};

// per-scheme mean and sample std of the campaign sum rates, tagged with value
std::vector<SweepRow> aggregate_rows(double value, const std::vector<Scheme>& schemes,
                                     const std::vector<TrialResult>& results);

std::vector<SweepRow> sweep(const ScenarioConfig& cfg, SweepAxis axis,
                            const std::vector<double>& values, const std::vector<Scheme>& schemes,
                            int trials);

struct BenchSize {
  int B = 0, K = 0, M = 0;
};

struct BenchRow {
  BenchSize size;
  StageTimes times;
  double sa_pred = 0.0;  // predicted subchannel-stage growth factor B^2 M + (K+1) B M + K M
  double ao_pred = 0.0;  // predicted association-stage growth factor B K + K
};

// wall-time per stage for one joint run at each size; report only
std::vector<BenchRow> bench_scaling(const ScenarioConfig& cfg, const std::vector<BenchSize>& sizes);

std::string results_csv(const std::vector<SweepRow>& rows);
std::string trace_csv(const std::vector<double>& trace);
std::string bench_csv(const std::vector<BenchRow>& rows);
std::string git_describe();
std::string meta_json(const ScenarioConfig& cfg, const std::vector<Scheme>& schemes,
                      const std::string& sweep_desc, int trials, double wall_s);

}  // namespace iab
