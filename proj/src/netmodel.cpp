#include "iab/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace iab {

Solution Solution::zeros(int B, int K, int M) {
  Solution s;
  const int N = B + K + 1;
  s.y = Eigen::MatrixXd::Zero(B + 1, N);
  s.x = Tensor3(B + 1, N, M);
  s.P = Eigen::MatrixXd::Zero(B + 1, M);
  return s;
}

int Solution::parent_of(int i) const {
  for (int b = 0; b < y.rows(); ++b)
    if (y(b, i) > 0.5) return b;
  return -1;
}

const ConstraintCheck& ConstraintReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no constraint check named " + name);
}

double sinr(const GainTable& gains, const Tensor3& x, const Eigen::MatrixXd& P, int b, int i,
            int m, double noise_w) {
  const int B = gains.num_sbs(), N = gains.num_nodes();
  double interf = 0.0;
  for (int bp = 0; bp <= B; ++bp) {
    if (bp == b || bp == i) continue;
    for (int ip = 1; ip < N; ++ip) {
      if (ip == b || ip == bp || ip == i) continue;
      const double xv = x(bp, ip, m);
      if (xv <= 0.0) continue;
      interf += xv * gains.cross(b, i, bp, ip, m) * P(bp, m);
    }
  }
  return gains.direct(b, i, m) * P(b, m) / (interf + noise_w);
}

double rate(double sinr_lin, double bandwidth_hz) {
  return bandwidth_hz * std::log2(1.0 + sinr_lin);
}

double link_rate(const GainTable& gains, const Tensor3& x, const Eigen::MatrixXd& P, int b, int i,
                 int m, const ScenarioConfig& cfg) {
  return rate(sinr(gains, x, P, b, i, m, cfg.noise_power_w()), cfg.bandwidth_hz);
}

double sum_rate(const GainTable& gains, const Solution& sol, const ScenarioConfig& cfg) {
  const int B = gains.num_sbs(), N = gains.num_nodes(), M = gains.num_subchannels();
  double total = 0.0;
  for (int b = 0; b <= B; ++b)
    for (int i = B + 1; i < N; ++i) {
      if (sol.y(b, i) <= 0.0) continue;
      for (int m = 0; m < M; ++m) {
        if (sol.x(b, i, m) <= 0.0) continue;
        total += sol.y(b, i) * sol.x(b, i, m) * link_rate(gains, sol.x, sol.P, b, i, m, cfg);
      }
    }
  return total;
}

namespace {

// per-link throughput carried on the association edge (parent -> node)
double assigned_rate(const GainTable& gains, const Solution& sol, const ScenarioConfig& cfg,
                     int b, int i) {
  double r = 0.0;
  for (int m = 0; m < gains.num_subchannels(); ++m)
    if (sol.x(b, i, m) > 0.0)
      r += sol.x(b, i, m) * link_rate(gains, sol.x, sol.P, b, i, m, cfg);
  return r;
}

}  // namespace

ConstraintReport validate(const GainTable& gains, const Solution& sol, const ScenarioConfig& cfg,
                          double tol) {
  const int B = gains.num_sbs(), M = gains.num_subchannels();
  const int N = gains.num_nodes();
  if (sol.y.rows() != B + 1 || sol.y.cols() != N || sol.P.rows() != B + 1 || sol.P.cols() != M ||
      sol.x.dim1() != B + 1 || sol.x.dim2() != N || sol.x.dim3() != M)
    throw std::invalid_argument("validate: solution dimensions do not match gains");

  ConstraintReport rep;
  auto add = [&rep](const std::string& name, double slack, double scale, const std::string& det) {
    ConstraintCheck c;
    c.name = name;
    c.worst_slack = slack;
    c.pass = slack >= -1e-6 * std::max(1.0, scale);
    c.detail = det;
    rep.checks.push_back(c);
  };
  (void)tol;
  const double rate_scale = std::max(cfg.min_rate_bps, cfg.bandwidth_hz);

  // per-UE QoS: assigned throughput meets the minimum rate
  {
    double worst = 1e300;
    int worst_i = -1;
    for (int i = B + 1; i < N; ++i) {
      double r = 0.0;
      for (int b = 0; b <= B; ++b)
        if (sol.y(b, i) > 0.5) r += assigned_rate(gains, sol, cfg, b, i);
      const double slack = r - cfg.min_rate_bps;
      if (slack < worst) worst = slack, worst_i = i;
    }
    add("qos", worst, rate_scale, "ue " + std::to_string(worst_i));
  }
  // per-SBS backhaul capacity: feeder link carries at least the traffic served
  {
    double worst = 1e300;
    int worst_b = -1;
    for (int s = 1; s <= B; ++s) {
      double in_rate = 0.0;
      for (int b = 0; b <= B; ++b)
        if (b != s && sol.y(b, s) > 0.5) in_rate += assigned_rate(gains, sol, cfg, b, s);
      double served = 0.0;
      for (int i = 1; i < N; ++i)
        if (i != s && sol.y(s, i) > 0.5) served += assigned_rate(gains, sol, cfg, s, i);
      const double slack = in_rate - served;
      if (slack < worst) worst = slack, worst_b = s;
    }
    if (B == 0) worst = 0.0;
    add("backhaul_capacity", worst, rate_scale, "sbs " + std::to_string(worst_b));
  }
  // one outgoing link per (BS, subchannel)
  {
    double worst = 1e300;
    for (int b = 0; b <= B; ++b)
      for (int m = 0; m < M; ++m) {
        double s = 0.0;
        for (int i = 1; i < N; ++i)
          if (i != b) s += sol.x(b, i, m);
        worst = std::min(worst, 1.0 - s);
      }
    add("one_link_per_subchannel", worst, 1.0, "");
  }
  // half-duplex: an SBS never transmits and receives on the same subchannel
  {
    double worst = 1e300;
    for (int s = 1; s <= B; ++s)
      for (int m = 0; m < M; ++m) {
        double txs = 0.0, rxs = 0.0;
        for (int i = 1; i < N; ++i)
          if (i != s) txs += sol.x(s, i, m);
        for (int b = 0; b <= B; ++b)
          if (b != s) rxs += sol.x(b, s, m);
        worst = std::min(worst, 1.0 - txs - rxs);
      }
    if (B == 0) worst = 1.0;
    add("half_duplex", worst, 1.0, "");
  }
  // exactly one parent per node
  {
    double worst = 1e300;
    for (int i = 1; i < N; ++i) {
      double s = 0.0;
      for (int b = 0; b <= B; ++b)
        if (b != i) s += sol.y(b, i);
      worst = std::min(worst, -std::abs(s - 1.0));
    }
    add("single_parent", worst, 1.0, "");
  }
  // at least one SBS anchored to the MBS
  {
    double s = 0.0;
    for (int b = 1; b <= B; ++b) s += sol.y(0, b);
    add("mbs_anchor", s - 1.0, 1.0, "");
  }
  // no mutual parent pairs
  {
    double worst = 1e300;
    for (int a = 1; a <= B; ++a)
      for (int b = a + 1; b <= B; ++b) worst = std::min(worst, 1.0 - sol.y(a, b) - sol.y(b, a));
    if (B < 2) worst = 1.0;
    add("no_two_cycle", worst, 1.0, "");
  }
  // power budget and nonnegativity
  {
    double worst = 1e300;
    int worst_b = -1;
    for (int b = 0; b <= B; ++b) {
      const double slack = cfg.max_power_w(b) - sol.P.row(b).sum();
      if (slack / cfg.max_power_w(b) < worst) worst = slack / cfg.max_power_w(b), worst_b = b;
    }
    add("power_budget", worst, 1.0, "bs " + std::to_string(worst_b));
    add("power_nonneg", sol.P.minCoeff() / cfg.max_power_w(0), 1.0, "");
  }
  // binariness
  {
    double dy = 0.0, dx = 0.0;
    for (int b = 0; b <= B; ++b)
      for (int i = 1; i < N; ++i) {
        if (i != b) dy = std::max(dy, std::abs(sol.y(b, i) - std::round(sol.y(b, i))));
        for (int m = 0; m < M; ++m)
          if (i != b) dx = std::max(dx, std::abs(sol.x(b, i, m) - std::round(sol.x(b, i, m))));
      }
    add("binary_y", -dy, 1.0, "");
    add("binary_x", -dx, 1.0, "");
  }
  // association cycles are legal under the printed constraints but disconnect
  // nodes from the core; report them for the caller to repair
  {
    for (int start = 1; start <= B; ++start) {
      std::vector<int> path;
      std::vector<char> seen(N, 0);
      int cur = start;
      while (cur > 0 && cur <= B && !seen[cur]) {
        seen[cur] = 1;
        path.push_back(cur);
        cur = sol.parent_of(cur);
      }
      if (cur > 0 && cur <= B) {
        auto it = std::find(path.begin(), path.end(), cur);
        std::vector<int> cyc(it, path.end());
        // record each cycle once, when the walk starts at its smallest member
        if (!cyc.empty() && *std::min_element(cyc.begin(), cyc.end()) == start)
          rep.cycles.push_back(cyc);
      }
    }
  }

  rep.feasible = true;
  for (const auto& c : rep.checks) rep.feasible = rep.feasible && c.pass;
  return rep;
}

std::string solution_to_json(const Solution& sol) {
  nlohmann::json j;
  const int Bp1 = static_cast<int>(sol.y.rows()), N = static_cast<int>(sol.y.cols());
  const int M = sol.x.dim3();
  nlohmann::json ylist = nlohmann::json::array(), xlist = nlohmann::json::array();
  for (int b = 0; b < Bp1; ++b)
    for (int i = 1; i < N; ++i) {
      if (sol.y(b, i) > 0.5) ylist.push_back({b, i});
      for (int m = 0; m < M; ++m)
        if (sol.x(b, i, m) > 0.5) xlist.push_back({b, i, m});
    }
  j["y"] = ylist;
  j["x"] = xlist;
  std::vector<std::vector<double>> P(Bp1, std::vector<double>(M));
  for (int b = 0; b < Bp1; ++b)
    for (int m = 0; m < M; ++m) P[b][m] = sol.P(b, m);
  j["P_watt"] = P;
  return j.dump(2);
}

std::string report_to_csv(const ConstraintReport& rep) {
  std::ostringstream ss;
  ss << "constraint,pass,worst_slack,detail\n";
  for (const auto& c : rep.checks) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", c.worst_slack);
    ss << c.name << "," << (c.pass ? 1 : 0) << "," << buf << "," << c.detail << "\n";
  }
  return ss.str();
}

}  // namespace iab
