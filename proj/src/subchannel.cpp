#include "iab/subchannel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace iab {

namespace {

constexpr double kEpsX = 1e-6;        // box margin for the relaxed shares
constexpr double kRowMargin = 1e-3;   // strict headroom inside shared-row constraints
constexpr double kCapMargin = 1e-3;   // relative backhaul headroom kept at anchors
constexpr double kHi = 0.9;           // initial value of scheduled shares

// Tree-link variable workspace. Share variables x (one per association link
// and subchannel) come first in the solver vector, followed by one rate-floor
// slack per user. Helper evaluations only ever read the share prefix.
struct Ws {
  int B = 0, K = 0, M = 0, N = 0, L = 0;
  double noise = 0.0, W = 0.0;
  std::vector<int> parent;                      // [node id]
  std::vector<std::vector<int>> children;       // [bs id] -> child node ids
  std::vector<double> pw;                       // [v] direct gain * P(parent, m)
  std::vector<std::vector<std::pair<int, double>>> interf;  // [v] -> (other link, kappa)

  int vx(int link, int m) const { return link * M + m; }
  int nx() const { return L * M; }
  int nvar() const { return L * M + K; }
  int link_of(int node) const { return node - 1; }
};

Ws build_ws(const GainTable& g, const MatX& y, const MatX& P, const ScenarioConfig& cfg) {
  Ws w;
  w.B = g.num_sbs();
  w.K = g.num_ues();
  w.M = g.num_subchannels();
  w.N = g.num_nodes();
  w.L = w.N - 1;
  w.noise = cfg.noise_power_w();
  w.W = cfg.bandwidth_hz;
  w.parent = parents_from(y);
  for (int i = 1; i < w.N; ++i)
    if (w.parent[i] < 0) throw std::invalid_argument("subchannel: node without a parent");
  w.children.assign(w.B + 1, {});
  for (int i = 1; i < w.N; ++i) w.children[w.parent[i]].push_back(i);

  w.pw.assign(static_cast<size_t>(w.L) * w.M, 0.0);
  w.interf.assign(static_cast<size_t>(w.L) * w.M, {});
  for (int i = 1; i < w.N; ++i) {
    const int l = w.link_of(i), b = w.parent[i];
    for (int m = 0; m < w.M; ++m) {
      w.pw[w.vx(l, m)] = g.direct(b, i, m) * P(b, m);
      auto& lst = w.interf[w.vx(l, m)];
      for (int ip = 1; ip < w.N; ++ip) {
        if (ip == i) continue;
        const int bp = w.parent[ip];
        if (bp == b || bp == i || ip == b) continue;
        const double kappa = g.cross(b, i, bp, ip, m) * P(bp, m);
        if (kappa > 0.0) lst.emplace_back(w.link_of(ip), kappa);
      }
    }
  }
  return w;
}

double interference_at(const Ws& w, const VecX& x, int v) {
  const int m = v % w.M;
  double s = 0.0;
  for (const auto& [lp, kappa] : w.interf[v]) s += kappa * x(w.vx(lp, m));
  return s;
}

double rate_at(const Ws& w, const VecX& x, int v) {
  const double gamma = w.pw[v] / (interference_at(w, x, v) + w.noise);
  return w.W * std::log2(1.0 + gamma);
}

double user_rate(const Ws& w, const VecX& x, int ue) {
  const int l = w.link_of(ue);
  double r = 0.0;
  for (int m = 0; m < w.M; ++m) r += x(w.vx(l, m)) * rate_at(w, x, w.vx(l, m));
  return r;
}

double true_objective(const Ws& w, const VecX& x, double mu, double rth) {
  double f = 0.0;
  for (int i = w.B + 1; i < w.N; ++i) {
    const double r = user_rate(w, x, i);
    f += r - kQosSlackCost * std::max(0.0, rth - r);
  }
  for (int v = 0; v < w.nx(); ++v) f -= mu * (x(v) - x(v) * x(v));
  return f;
}

double relay_in_rate(const Ws& w, const VecX& x, int s) {
  const int l = w.link_of(s);
  double r = 0.0;
  for (int m = 0; m < w.M; ++m) r += x(w.vx(l, m)) * rate_at(w, x, w.vx(l, m));
  return r;
}

double relay_out_rate(const Ws& w, const VecX& x, int s) {
  double r = 0.0;
  for (int c : w.children[s])
    for (int m = 0; m < w.M; ++m) {
      const int v = w.vx(w.link_of(c), m);
      r += x(v) * rate_at(w, x, v);
    }
  return r;
}

// scale shared rows down to strict feasibility; sums only shrink, so a single
// pass over the rows settles
void project_rows(const Ws& w, VecX& x) {
  auto scale_row = [&](const std::vector<int>& vars) {
    double s = 0.0;
    for (int v : vars) s += x(v);
    if (s > 1.0 - kRowMargin) {
      const double f = (1.0 - kRowMargin) / s;
      for (int v : vars) x(v) = std::max(kEpsX, x(v) * f);
    }
  };
  for (int b = 0; b <= w.B; ++b) {
    if (w.children[b].empty()) continue;
    for (int m = 0; m < w.M; ++m) {
      std::vector<int> vars;
      for (int c : w.children[b]) vars.push_back(w.vx(w.link_of(c), m));
      scale_row(vars);
    }
  }
  for (int s = 1; s <= w.B; ++s) {
    if (w.children[s].empty()) continue;
    for (int m = 0; m < w.M; ++m) {
      std::vector<int> vars = {w.vx(w.link_of(s), m)};
      for (int c : w.children[s]) vars.push_back(w.vx(w.link_of(c), m));
      scale_row(vars);
    }
  }
}

// shrink child shares until every relay's feeder covers its served load;
// relays that cannot be repaired are flagged and their capacity row dropped
void repair_capacity(const Ws& w, VecX& x, std::vector<char>& dropped, bool& fallback) {
  for (int sweep = 0; sweep < 24; ++sweep) {
    bool bad = false;
    for (int s = 1; s <= w.B; ++s) {
      if (w.children[s].empty() || dropped[s]) continue;
      const double in = relay_in_rate(w, x, s);
      const double out = relay_out_rate(w, x, s);
      if (out <= in * (1.0 - kCapMargin)) continue;
      bad = true;
      double theta = 0.0;
      if (in > 0.0 && out > 0.0) theta = std::max(0.05, in * (1.0 - 2.0 * kCapMargin) / out);
      for (int c : w.children[s])
        for (int m = 0; m < w.M; ++m) {
          const int v = w.vx(w.link_of(c), m);
          x(v) = std::max(kEpsX, x(v) * theta);
        }
    }
    if (!bad) return;
  }
  for (int s = 1; s <= w.B; ++s) {
    if (w.children[s].empty() || dropped[s]) continue;
    if (relay_out_rate(w, x, s) > relay_in_rate(w, x, s) * (1.0 - kCapMargin) + 1e-12) {
      dropped[s] = 1;
      fallback = true;
    }
  }
}

// anchor coefficients of the concave surrogate
struct Anchor {
  VecX x0;                           // shares only
  std::vector<double> It, c1, c2;    // per share variable
  std::vector<double> out0;          // per relay: served load at the anchor
  std::vector<VecX> gout;            // per relay: served-load gradient over shares
};

Anchor make_anchor(const Ws& w, const VecX& x) {
  Anchor a;
  a.x0 = x.head(w.nx());
  const int nx = w.nx();
  a.It.resize(nx);
  a.c1.resize(nx);
  a.c2.resize(nx);
  for (int v = 0; v < nx; ++v) {
    a.It[v] = interference_at(w, x, v);
    const double gamma = w.pw[v] / (a.It[v] + w.noise);
    a.c1[v] = w.W * a.x0(v) * std::log2(1.0 + gamma);
    a.c2[v] = w.W * a.x0(v) * gamma / ((1.0 + gamma) * M_LN2);
  }
  a.out0.assign(w.B + 1, 0.0);
  a.gout.assign(w.B + 1, VecX());
  for (int s = 1; s <= w.B; ++s) {
    if (w.children[s].empty()) continue;
    VecX g = VecX::Zero(nx);
    double o0 = 0.0;
    for (int c : w.children[s])
      for (int m = 0; m < w.M; ++m) {
        const int v = w.vx(w.link_of(c), m);
        const double inoise = a.It[v] + w.noise;
        const double gamma = w.pw[v] / inoise;
        const double r = w.W * std::log2(1.0 + gamma);
        o0 += a.x0(v) * r;
        g(v) += r;
        // served load also moves with the interference seen by the children
        const double drdi = -w.W / M_LN2 * gamma / ((1.0 + gamma) * inoise);
        for (const auto& [lp, kappa] : w.interf[v]) g(w.vx(lp, m)) += a.x0(v) * drdi * kappa;
      }
    a.out0[s] = o0;
    a.gout[s] = g;
  }
  return a;
}

double bound_term(const Ws& w, const Anchor& a, const VecX& x, int v) {
  const double u = (interference_at(w, x, v) + w.noise) / (a.It[v] + w.noise);
  return a.c1[v] * (2.0 - a.x0(v) / x(v)) + a.c2[v] * (1.0 - u);
}

void add_bound_grad(const Ws& w, const Anchor& a, const VecX& x, int v, VecX& g) {
  g(v) += a.c1[v] * a.x0(v) / (x(v) * x(v));
  const double scale = a.c2[v] / (a.It[v] + w.noise);
  const int m = v % w.M;
  for (const auto& [lp, kappa] : w.interf[v]) g(w.vx(lp, m)) -= scale * kappa;
}

ConvexProgram build_program(const Ws& w, const Anchor& a, double mu, double rho, double rth,
                            double s_up, const std::vector<char>& cap_dropped) {
  ConvexProgram p;
  p.n = w.nvar();
  p.lower = VecX::Zero(p.n);
  p.upper = VecX::Constant(p.n, s_up);
  // the share box is slightly wider than the kEpsX value floor so that
  // repaired iterates always sit strictly inside it
  for (int v = 0; v < w.nx(); ++v) {
    p.lower(v) = 0.5 * kEpsX;
    p.upper(v) = 1.0 - 0.5 * kEpsX;
  }

  p.objective = [&w, &a, mu, rho](const VecX& x) {
    double f = 0.0;
    for (int i = w.B + 1; i < w.N; ++i) {
      const int l = w.link_of(i);
      for (int m = 0; m < w.M; ++m) f += bound_term(w, a, x, w.vx(l, m));
    }
    for (int v = 0; v < w.nx(); ++v)
      f += mu * (2.0 * a.x0(v) * x(v) - a.x0(v) * a.x0(v)) - mu * x(v);
    for (int k = w.nx(); k < w.nvar(); ++k) f -= rho * x(k);
    return f;
  };
  p.objective_grad = [&w, &a, mu, rho](const VecX& x) {
    VecX g = VecX::Zero(w.nvar());
    for (int i = w.B + 1; i < w.N; ++i) {
      const int l = w.link_of(i);
      for (int m = 0; m < w.M; ++m) add_bound_grad(w, a, x, w.vx(l, m), g);
    }
    for (int v = 0; v < w.nx(); ++v) g(v) += mu * (2.0 * a.x0(v) - 1.0);
    for (int k = w.nx(); k < w.nvar(); ++k) g(k) -= rho;
    return g;
  };
  p.objective_hess_diag = [&w, &a](const VecX& x) {
    VecX h = VecX::Zero(w.nvar());
    for (int i = w.B + 1; i < w.N; ++i) {
      const int l = w.link_of(i);
      for (int m = 0; m < w.M; ++m) {
        const int v = w.vx(l, m);
        h(v) += 2.0 * a.c1[v] * a.x0(v) / (x(v) * x(v) * x(v));
      }
    }
    return h;
  };

  auto affine_row = [&p](std::string name, std::vector<int> vars) {
    SolverConstraint c;
    c.name = std::move(name);
    c.value = [vars](const VecX& x) {
      double s = 1.0;
      for (int v : vars) s -= x(v);
      return s;
    };
    c.grad = [vars, n = p.n](const VecX&) {
      VecX g = VecX::Zero(n);
      for (int v : vars) g(v) = -1.0;
      return g;
    };
    p.ineq.push_back(std::move(c));
  };

  // one outgoing link per subchannel at every transmitter
  for (int b = 0; b <= w.B; ++b) {
    if (w.children[b].empty()) continue;
    for (int m = 0; m < w.M; ++m) {
      std::vector<int> vars;
      for (int c : w.children[b]) vars.push_back(w.vx(w.link_of(c), m));
      if (vars.size() < 2) continue;  // the box already caps single entries
      affine_row("share_b" + std::to_string(b) + "_m" + std::to_string(m), std::move(vars));
    }
  }
  // a relay never transmits and receives on the same subchannel
  for (int s = 1; s <= w.B; ++s) {
    if (w.children[s].empty()) continue;
    for (int m = 0; m < w.M; ++m) {
      std::vector<int> vars = {w.vx(w.link_of(s), m)};
      for (int c : w.children[s]) vars.push_back(w.vx(w.link_of(c), m));
      affine_row("duplex_s" + std::to_string(s) + "_m" + std::to_string(m), std::move(vars));
    }
  }
  // soft rate floor per user
  for (int i = w.B + 1; i < w.N; ++i) {
    const int l = w.link_of(i), sv = w.nx() + (i - w.B - 1);
    SolverConstraint c;
    c.name = "floor_ue" + std::to_string(i);
    c.value = [&w, &a, l, sv, rth](const VecX& x) {
      double val = x(sv) - rth;
      for (int m = 0; m < w.M; ++m) val += bound_term(w, a, x, w.vx(l, m));
      return val;
    };
    c.grad = [&w, &a, l, sv](const VecX& x) {
      VecX g = VecX::Zero(w.nvar());
      for (int m = 0; m < w.M; ++m) add_bound_grad(w, a, x, w.vx(l, m), g);
      g(sv) += 1.0;
      return g;
    };
    c.hess_diag = [&w, &a, l](const VecX& x) {
      VecX h = VecX::Zero(w.nvar());
      for (int m = 0; m < w.M; ++m) {
        const int v = w.vx(l, m);
        h(v) += 2.0 * a.c1[v] * a.x0(v) / (x(v) * x(v) * x(v));
      }
      return h;
    };
    p.ineq.push_back(std::move(c));
  }
  // hard backhaul capacity: feeder minorant above the linearized served load
  for (int s = 1; s <= w.B; ++s) {
    if (w.children[s].empty() || cap_dropped[s]) continue;
    const int lf = w.link_of(s);
    SolverConstraint c;
    c.name = "backhaul_s" + std::to_string(s);
    c.value = [&w, &a, lf, s](const VecX& x) {
      double val = -a.out0[s] - a.gout[s].dot(x.head(w.nx()) - a.x0);
      for (int m = 0; m < w.M; ++m) val += bound_term(w, a, x, w.vx(lf, m));
      return val;
    };
    c.grad = [&w, &a, lf, s](const VecX& x) {
      VecX g = VecX::Zero(w.nvar());
      g.head(w.nx()) = -a.gout[s];
      for (int m = 0; m < w.M; ++m) add_bound_grad(w, a, x, w.vx(lf, m), g);
      return g;
    };
    c.hess_diag = [&w, &a, lf](const VecX& x) {
      VecX h = VecX::Zero(w.nvar());
      for (int m = 0; m < w.M; ++m) {
        const int v = w.vx(lf, m);
        h(v) += 2.0 * a.c1[v] * a.x0(v) / (x(v) * x(v) * x(v));
      }
      return h;
    };
    p.ineq.push_back(std::move(c));
  }
  return p;
}

}  // namespace

double sca_rate_bound(double x, double x_anchor, double sinr_anchor, double interf_w,
                      double interf_anchor_w, double noise_w, double bandwidth_hz) {
  const double c1 = bandwidth_hz * x_anchor * std::log2(1.0 + sinr_anchor);
  const double c2 = bandwidth_hz * x_anchor * sinr_anchor / ((1.0 + sinr_anchor) * M_LN2);
  const double u = (interf_w + noise_w) / (interf_anchor_w + noise_w);
  return c1 * (2.0 - x_anchor / x) + c2 * (1.0 - u);
}

double binary_penalty(const VecX& x_shares, double mu) {
  double s = 0.0;
  for (int k = 0; k < x_shares.size(); ++k) s += x_shares(k) * (1.0 - x_shares(k));
  return mu * s;
}

std::vector<int> parents_from(const MatX& y) {
  const int N = static_cast<int>(y.cols());
  std::vector<int> p(N, -1);
  for (int i = 1; i < N; ++i)
    for (int b = 0; b < y.rows(); ++b)
      if (y(b, i) > 0.5) {
        p[i] = b;
        break;
      }
  return p;
}

double penalty_scale(const GainTable& gains, const ScenarioConfig& cfg) {
  const int B = gains.num_sbs(), N = gains.num_nodes(), M = gains.num_subchannels();
  double peak = 0.0;
  for (int b = 0; b <= B; ++b)
    for (int i = 1; i < N; ++i) {
      if (i == b) continue;
      for (int m = 0; m < M; ++m)
        peak = std::max(peak, gains.direct(b, i, m) * cfg.max_power_w(b));
    }
  return cfg.bandwidth_hz * std::log2(1.0 + peak / cfg.noise_power_w());
}

double sa_true_objective(const GainTable& gains, const MatX& y, const Tensor3& x, const MatX& P,
                         const ScenarioConfig& cfg, double mu_pen) {
  Ws w = build_ws(gains, y, P, cfg);
  VecX xv = VecX::Zero(w.nx());
  for (int i = 1; i < w.N; ++i)
    for (int m = 0; m < w.M; ++m) xv(w.vx(w.link_of(i), m)) = x(w.parent[i], i, m);
  return true_objective(w, xv, mu_pen, cfg.min_rate_bps);
}

SaResult run_sa(const GainTable& gains, const MatX& y, const MatX& P, const ScenarioConfig& cfg,
                const Tensor3* x_init) {
  Ws w = build_ws(gains, y, P, cfg);
  const double rth = cfg.min_rate_bps;
  const double pscale = penalty_scale(gains, cfg);
  const double mu = cfg.penalty_factor * pscale;
  const double rho = kQosSlackCost;
  const double s_up = std::max({1.0, 10.0 * rth, 4.0 * w.M * pscale});

  // initial shares: project a warm start, or schedule each link greedily on
  // its strongest still-compatible subchannel
  VecX x = VecX::Constant(w.nx(), kEpsX);
  if (x_init != nullptr) {
    for (int i = 1; i < w.N; ++i)
      for (int m = 0; m < w.M; ++m) {
        const double v = (*x_init)(w.parent[i], i, m);
        x(w.vx(w.link_of(i), m)) = std::clamp(v, kEpsX, kHi);
      }
  } else {
    std::vector<std::vector<char>> tx_used(w.B + 1, std::vector<char>(w.M, 0));
    std::vector<std::vector<char>> rx_used(w.B + 1, std::vector<char>(w.M, 0));
    for (int i = 1; i < w.N; ++i) {
      if (i <= w.B && w.children[i].empty()) continue;  // idle feeder carries nothing
      const int b = w.parent[i];
      int best = -1;
      double best_pw = -1.0;
      for (int m = 0; m < w.M; ++m) {
        if (tx_used[b][m]) continue;                  // another child owns it
        if (b >= 1 && rx_used[b][m]) continue;        // parent receives there
        if (i <= w.B && tx_used[i][m]) continue;      // relay already sends there
        const double pm = w.pw[w.vx(w.link_of(i), m)];
        if (pm > best_pw) best_pw = pm, best = m;
      }
      if (best < 0) continue;                         // stays unscheduled
      x(w.vx(w.link_of(i), best)) = kHi;
      tx_used[b][best] = 1;
      if (i <= w.B) rx_used[i][best] = 1;
    }
  }
  project_rows(w, x);

  SaResult res;
  res.mu_pen = mu;
  std::vector<char> dropped(w.B + 1, 0);
  // a relay whose feeder and serving links all carry zero power yields an
  // identically-zero capacity row; it would fail the strict-interior start
  // check, and no share assignment moves any rate through it anyway
  for (int s = 1; s <= w.B; ++s) {
    if (w.children[s].empty()) continue;
    double peak = 0.0;
    for (int m = 0; m < w.M; ++m) peak = std::max(peak, w.pw[w.vx(w.link_of(s), m)]);
    for (int c : w.children[s])
      for (int m = 0; m < w.M; ++m) peak = std::max(peak, w.pw[w.vx(w.link_of(c), m)]);
    if (peak <= 0.0) dropped[s] = 1;
  }
  repair_capacity(w, x, dropped, res.fallback);
  res.trace.push_back(true_objective(w, x, mu, rth));

  for (int it = 1; it <= cfg.max_sa_iters; ++it) {
    res.iters = it;
    // anchor at a strictly feasible copy of the iterate; constrained rows must
    // hold with margin at the start of every inner solve
    VecX xs = x;
    project_rows(w, xs);
    repair_capacity(w, xs, dropped, res.fallback);
    Anchor a = make_anchor(w, xs);
    ConvexProgram prog = build_program(w, a, mu, rho, rth, s_up, dropped);

    VecX start(w.nvar());
    start.head(w.nx()) = xs;
    for (int i = w.B + 1; i < w.N; ++i) {
      const double shortfall = std::max(0.0, rth - user_rate(w, xs, i));
      start(w.nx() + (i - w.B - 1)) = std::min(0.9 * s_up, std::max(1e-3, 1.2 * shortfall));
    }
    auto sol = solve(prog, start, cfg.kkt_tol, 400);

    double cap_slack = std::numeric_limits<double>::infinity();
    for (const auto& c : prog.ineq)
      if (c.name.rfind("backhaul_", 0) == 0) cap_slack = std::min(cap_slack, c.value(sol.x));
    res.cap_slack_trace.push_back(cap_slack);

    VecX cand = sol.x.head(w.nx());
    repair_capacity(w, cand, dropped, res.fallback);
    const double f_prev = res.trace.back();
    const double f_cand = true_objective(w, cand, mu, rth);
    if (f_cand < f_prev - 1e-9 * std::max(1.0, std::abs(f_prev))) break;
    x = cand;
    res.trace.push_back(std::max(f_cand, f_prev));
    if (std::abs(f_cand - f_prev) <= cfg.conv_tol * std::max(1.0, std::abs(f_prev))) break;
  }

  res.x_frac = Tensor3(w.B + 1, w.N, w.M);
  for (int i = 1; i < w.N; ++i)
    for (int m = 0; m < w.M; ++m)
      res.x_frac(w.parent[i], i, m) = x(w.vx(w.link_of(i), m));
  res.x = round_allocation(gains, y, res.x_frac, P, cfg);
  return res;
}

Tensor3 round_allocation(const GainTable& gains, const MatX& y, const Tensor3& x_frac,
                         const MatX& P, const ScenarioConfig& cfg) {
  Ws w = build_ws(gains, y, P, cfg);
  VecX xf = VecX::Zero(w.nx());
  for (int i = 1; i < w.N; ++i)
    for (int m = 0; m < w.M; ++m) xf(w.vx(w.link_of(i), m)) = x_frac(w.parent[i], i, m);

  VecX xb = VecX::Zero(w.nx());
  for (int v = 0; v < w.nx(); ++v) xb(v) = xf(v) >= 0.5 ? 1.0 : 0.0;

  // per-entry throughput of the pre-repair binary point, used to rank drops
  std::vector<double> entry_rate(w.nx(), 0.0);
  for (int v = 0; v < w.nx(); ++v)
    if (xb(v) > 0.5) entry_rate[v] = rate_at(w, xb, v);

  // one scheduled child per (transmitter, subchannel)
  for (int b = 0; b <= w.B; ++b)
    for (int m = 0; m < w.M; ++m) {
      int keep = -1;
      for (int c : w.children[b]) {
        const int v = w.vx(w.link_of(c), m);
        if (xb(v) < 0.5) continue;
        if (keep < 0 || entry_rate[v] > entry_rate[keep]) keep = v;
      }
      for (int c : w.children[b]) {
        const int v = w.vx(w.link_of(c), m);
        if (xb(v) > 0.5 && v != keep) xb(v) = 0.0;
      }
    }
  // a relay never both sends and receives on one subchannel: keep the richer side
  for (int s = 1; s <= w.B; ++s)
    for (int m = 0; m < w.M; ++m) {
      const int vf = w.vx(w.link_of(s), m);
      int vc = -1;
      for (int c : w.children[s]) {
        const int v = w.vx(w.link_of(c), m);
        if (xb(v) > 0.5) vc = v;
      }
      if (xb(vf) > 0.5 && vc >= 0) {
        if (entry_rate[vf] >= entry_rate[vc])
          xb(vc) = 0.0;
        else
          xb(vf) = 0.0;
      }
    }
  // backhaul load: drop the weakest served entries until the feeder carries the
  // rest. A drop can starve a relay further down a chain (its feeder is the
  // dropped entry), so sweep until a full pass leaves every relay covered
  for (bool again = true; again;) {
    again = false;
    for (int s = 1; s <= w.B; ++s) {
      for (int guard = 0; guard < w.nx(); ++guard) {
        const double in = relay_in_rate(w, xb, s);
        const double out = relay_out_rate(w, xb, s);
        if (out <= in * (1.0 + 1e-9) + 1e-9) break;
        int worst = -1;
        double worst_rate = 0.0;
        for (int c : w.children[s])
          for (int m = 0; m < w.M; ++m) {
            const int v = w.vx(w.link_of(c), m);
            if (xb(v) < 0.5) continue;
            const double r = rate_at(w, xb, v);
            if (worst < 0 || r < worst_rate) worst = v, worst_rate = r;
          }
        if (worst < 0) break;
        xb(worst) = 0.0;
        again = true;
      }
    }
  }

  Tensor3 out(w.B + 1, w.N, w.M);
  for (int i = 1; i < w.N; ++i)
    for (int m = 0; m < w.M; ++m) out(w.parent[i], i, m) = xb(w.vx(w.link_of(i), m));
  return out;
}

}  // namespace iab
