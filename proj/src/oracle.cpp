#include "iab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace iab {

namespace {

constexpr double kRateTol = 1e-6;  // bps slack granted to QoS and backhaul sums

struct Enum {
  int B, K, M, N, L;
  std::vector<double> budget;

  explicit Enum(const GainTable& g, const ScenarioConfig& cfg)
      : B(g.num_sbs()), K(g.num_ues()), M(g.num_subchannels()), N(g.num_nodes()), L(N - 1) {
    budget.resize(B + 1);
    for (int b = 0; b <= B; ++b) budget[b] = cfg.max_power_w(b);
  }
};

// all single-parent assignments obeying the anchor and 2-cycle rules
std::vector<std::vector<int>> feasible_parent_sets(const Enum& e) {
  std::vector<std::vector<int>> out;
  std::vector<int> parent(e.N, -1);
  auto rec_ue = [&](auto&& self, int i) -> void {
    if (i == e.N) {
      out.push_back(parent);
      return;
    }
    for (int b = 0; b <= e.B; ++b) {
      parent[i] = b;
      self(self, i + 1);
    }
    parent[i] = -1;
  };
  auto rec_sbs = [&](auto&& self, int s) -> void {
    if (s == e.B + 1) {
      bool anchored = e.B == 0;
      for (int b = 1; b <= e.B && !anchored; ++b) anchored = parent[b] == 0;
      if (!anchored) return;
      for (int b = 1; b <= e.B; ++b)
        for (int bp = 1; bp < b; ++bp)
          if (parent[b] == bp && parent[bp] == b) return;  // 2-cycle
      rec_ue(rec_ue, e.B + 1);
      return;
    }
    for (int b = 0; b <= e.B; ++b) {
      if (b == s) continue;
      parent[s] = b;
      self(self, s + 1);
    }
    parent[s] = -1;
  };
  rec_sbs(rec_sbs, 1);
  return out;
}

// per-(pattern, power column) totals on one subchannel
struct CellStats {
  std::vector<double> ue_rate;   // per UE
  std::vector<double> in, out;   // per relay id 1..B (index b)
  double obj = 0.0;
};

}  // namespace

OracleResult exhaustive_solve(const GainTable& gains, const ScenarioConfig& cfg,
                              int power_levels) {
  if (power_levels < 2) throw std::invalid_argument("oracle: need at least 2 power levels");
  Enum e(gains, cfg);

  // size the search arithmetically before materializing anything
  const double n_y = std::pow(std::max(1, e.B), e.B) * std::pow(e.B + 1.0, e.K);
  double n_cols = 1.0;
  for (int b = 0; b <= e.B; ++b) n_cols *= power_levels;
  const double n_total = n_y * std::pow(std::pow(2.0, e.L) * n_cols, e.M);
  if (!(n_total <= 1e8)) throw std::invalid_argument("oracle: instance too large");
  const auto psets = feasible_parent_sets(e);

  const double rth = cfg.min_rate_bps;
  const int ncol = static_cast<int>(n_cols + 0.5);

  // power value of column c for transmitter b
  std::vector<std::vector<double>> colp(ncol, std::vector<double>(e.B + 1));
  for (int c = 0; c < ncol; ++c) {
    int rem = c;
    for (int b = 0; b <= e.B; ++b) {
      colp[c][b] = e.budget[b] * (rem % power_levels) / (power_levels - 1);
      rem /= power_levels;
    }
  }

  double best = -1.0;
  std::vector<int> best_parent;
  std::vector<std::pair<int, int>> best_pick;  // per m: (pattern, column)

  for (const auto& parent : psets) {
    // shareable patterns: per transmitter at most one link, and no relay
    // both feeding and serving on the subchannel
    std::vector<int> patterns;
    for (int mask = 0; mask < (1 << e.L); ++mask) {
      std::vector<int> txc(e.B + 1, 0);
      bool ok = true;
      for (int i = 1; i < e.N && ok; ++i)
        if (mask & (1 << (i - 1)))
          if (++txc[parent[i]] > 1) ok = false;
      for (int s = 1; s <= e.B && ok; ++s)
        if ((mask & (1 << (s - 1))) && txc[s] > 0) ok = false;
      if (ok) patterns.push_back(mask);
    }

    // rate tables per subchannel
    std::vector<std::vector<CellStats>> table(e.M);
    Tensor3 x(e.B + 1, e.N, e.M);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(e.B + 1, e.M);
    for (int m = 0; m < e.M; ++m) {
      table[m].resize(patterns.size() * ncol);
      for (size_t pi = 0; pi < patterns.size(); ++pi) {
        const int mask = patterns[pi];
        for (int i = 1; i < e.N; ++i) x(parent[i], i, m) = (mask >> (i - 1)) & 1;
        for (int c = 0; c < ncol; ++c) {
          for (int b = 0; b <= e.B; ++b) P(b, m) = colp[c][b];
          CellStats& st = table[m][pi * ncol + c];
          st.ue_rate.assign(e.K, 0.0);
          st.in.assign(e.B + 1, 0.0);
          st.out.assign(e.B + 1, 0.0);
          for (int i = 1; i < e.N; ++i) {
            if (!((mask >> (i - 1)) & 1)) continue;
            const double r = link_rate(gains, x, P, parent[i], i, m, cfg);
            if (i > e.B) {
              st.ue_rate[i - e.B - 1] = r;
              st.obj += r;
            } else {
              st.in[i] = r;
            }
            if (parent[i] >= 1) st.out[parent[i]] += r;
          }
        }
      }
      for (int i = 1; i < e.N; ++i) x(parent[i], i, m) = 0.0;
    }

    // combine subchannels depth-first with budget pruning
    std::vector<std::pair<int, int>> pick(e.M);
    std::vector<double> used(e.B + 1, 0.0), ue(e.K, 0.0), tin(e.B + 1, 0.0), tout(e.B + 1, 0.0);
    double obj = 0.0;
    auto dfs = [&](auto&& self, int m) -> void {
      if (m == e.M) {
        if (obj <= best) return;
        for (int k = 0; k < e.K; ++k)
          if (ue[k] < rth - kRateTol) return;
        for (int s = 1; s <= e.B; ++s)
          if (tout[s] > tin[s] + kRateTol) return;
        best = obj;
        best_parent = parent;
        best_pick = pick;
        return;
      }
      for (size_t pi = 0; pi < patterns.size(); ++pi)
        for (int c = 0; c < ncol; ++c) {
          bool fits = true;
          for (int b = 0; b <= e.B && fits; ++b)
            if (used[b] + colp[c][b] > e.budget[b] + 1e-12) fits = false;
          if (!fits) continue;
          const CellStats& st = table[m][pi * ncol + c];
          pick[m] = {static_cast<int>(pi), c};
          for (int b = 0; b <= e.B; ++b) used[b] += colp[c][b];
          for (int k = 0; k < e.K; ++k) ue[k] += st.ue_rate[k];
          for (int s = 1; s <= e.B; ++s) {
            tin[s] += st.in[s];
            tout[s] += st.out[s];
          }
          obj += st.obj;
          self(self, m + 1);
          obj -= st.obj;
          for (int s = 1; s <= e.B; ++s) {
            tin[s] -= st.in[s];
            tout[s] -= st.out[s];
          }
          for (int k = 0; k < e.K; ++k) ue[k] -= st.ue_rate[k];
          for (int b = 0; b <= e.B; ++b) used[b] -= colp[c][b];
        }
    };

    dfs(dfs, 0);
    // store masks, not pattern indices, when this tree produced the best
    if (!best_pick.empty() && best_parent == parent)
      for (auto& [pi, c] : best_pick) pi = patterns[pi];
  }

  if (best < 0.0) throw std::runtime_error("oracle: no feasible configuration");

  OracleResult res;
  res.sol = Solution::zeros(e.B, e.K, e.M);
  for (int i = 1; i < e.N; ++i) res.sol.y(best_parent[i], i) = 1.0;
  for (int m = 0; m < e.M; ++m) {
    const auto [mask, c] = best_pick[m];
    for (int i = 1; i < e.N; ++i)
      if ((mask >> (i - 1)) & 1) res.sol.x(best_parent[i], i, m) = 1.0;
    for (int b = 0; b <= e.B; ++b) res.sol.P(b, m) = colp[c][b];
  }
  res.objective = sum_rate(gains, res.sol, cfg);
  return res;
}

namespace {

// objective when the fixed-structure solution respects floors, backhaul sums
// and budgets; -1 otherwise
double feasible_objective(const GainTable& g, const Solution& sol, const ScenarioConfig& cfg) {
  const int B = g.num_sbs(), N = g.num_nodes(), M = g.num_subchannels();
  for (int b = 0; b <= B; ++b) {
    if (sol.P.row(b).minCoeff() < -1e-12) return -1.0;
    if (sol.P.row(b).sum() > cfg.max_power_w(b) + 1e-9) return -1.0;
  }
  std::vector<double> in(B + 1, 0.0), out(B + 1, 0.0);
  double obj = 0.0;
  for (int i = 1; i < N; ++i) {
    const int b = sol.parent_of(i);
    if (b < 0) continue;
    double r = 0.0;
    for (int m = 0; m < M; ++m)
      if (sol.x(b, i, m) > 0.5) r += link_rate(g, sol.x, sol.P, b, i, m, cfg);
    if (i > B) {
      if (r < cfg.min_rate_bps - kRateTol) return -1.0;
      obj += r;
    } else {
      in[i] = r;
    }
    if (b >= 1) out[b] += r;
  }
  for (int s = 1; s <= B; ++s)
    if (out[s] > in[s] + kRateTol) return -1.0;
  return obj;
}

}  // namespace

Solution grid_refine(const GainTable& gains, const Solution& sol, const ScenarioConfig& cfg,
                     double step_w) {
  if (!(step_w > 0.0)) throw std::invalid_argument("oracle: refine step must be positive");
  Solution cur = sol;
  double best = feasible_objective(gains, cur, cfg);
  if (best < 0.0) throw std::invalid_argument("oracle: refine needs a feasible solution");

  const int B = gains.num_sbs(), M = gains.num_subchannels();
  for (int sweep = 0; sweep < 64; ++sweep) {
    bool moved = false;
    for (int b = 0; b <= B; ++b)
      for (int m = 0; m < M; ++m) {
        const double headroom = cfg.max_power_w(b) - (cur.P.row(b).sum() - cur.P(b, m));
        double bv = cur.P(b, m), bo = best;
        for (int k = 0;; ++k) {
          const double v = k * step_w;
          if (v > headroom + 1e-12) break;
          if (std::abs(v - cur.P(b, m)) < 1e-15) continue;
          Solution cand = cur;
          cand.P(b, m) = v;
          const double o = feasible_objective(gains, cand, cfg);
          if (o > bo + 1e-12) {
            bo = o;
            bv = v;
          }
        }
        if (bv != cur.P(b, m)) {
          cur.P(b, m) = bv;
          best = bo;
          moved = true;
        }
      }
    if (!moved) break;
  }
  return cur;
}

}  // namespace iab
