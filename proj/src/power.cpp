#include "iab/power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "iab/solver.hpp"
#include "iab/subchannel.hpp"

namespace iab {

namespace {

constexpr double kCapMargin = 1e-3;    // relative backhaul headroom at anchors
constexpr double kRowUse = 0.995;      // budget fraction usable by a start point
constexpr double kRateEps = 1e-9;      // bps below which a backhaul row is vacuous

// interference-plus-noise at receiver i of transmitter b on subchannel m,
// with the same exclusions the network model applies
double interf_noise(const GainTable& g, const Tensor3& x, const MatX& P, int b, int i, int m,
                    double noise) {
  const int B = g.num_sbs(), N = g.num_nodes();
  double s = noise;
  for (int bp = 0; bp <= B; ++bp) {
    if (bp == b || bp == i) continue;
    for (int ip = 1; ip < N; ++ip) {
      if (ip == b || ip == bp || ip == i) continue;
      const double xv = x(bp, ip, m);
      if (xv <= 0.0) continue;
      s += xv * g.cross(b, i, bp, ip, m) * P(bp, m);
    }
  }
  return s;
}

void add_interf_grad(const GainTable& g, const Tensor3& x, int b, int i, int m, double scale,
                     MatX& grad) {
  const int B = g.num_sbs(), N = g.num_nodes();
  for (int bp = 0; bp <= B; ++bp) {
    if (bp == b || bp == i) continue;
    for (int ip = 1; ip < N; ++ip) {
      if (ip == b || ip == bp || ip == i) continue;
      const double xv = x(bp, ip, m);
      if (xv <= 0.0) continue;
      grad(bp, m) += scale * xv * g.cross(b, i, bp, ip, m);
    }
  }
}

// solver-facing workspace over the scheduled power variables only; a BS gets a
// variable for subchannel m only if it serves some link there, so unused
// entries of P are structurally zero
struct Pw {
  int B = 0, K = 0, M = 0, N = 0;
  double noise = 0.0, W = 0.0;
  std::vector<double> budget;                   // [b]
  std::vector<int> vmap;                        // b*M+m -> var or -1
  std::vector<std::pair<int, int>> vinv;        // var -> (b, m)

  struct Link {
    int b, i, m;
    double a0;                                  // direct coefficient, scaled
    std::vector<std::pair<int, double>> terms;  // (var, scaled cross coefficient)
  };
  std::vector<Link> links;

  int np() const { return static_cast<int>(vinv.size()); }
  int nvar() const { return np() + K; }
};

Pw build_pw(const GainTable& g, const MatX& y, const Tensor3& x, const ScenarioConfig& cfg) {
  Pw w;
  w.B = g.num_sbs();
  w.K = g.num_ues();
  w.M = g.num_subchannels();
  w.N = g.num_nodes();
  w.noise = cfg.noise_power_w();
  w.W = cfg.bandwidth_hz;
  w.budget.resize(w.B + 1);
  for (int b = 0; b <= w.B; ++b) w.budget[b] = cfg.max_power_w(b);

  w.vmap.assign(static_cast<size_t>(w.B + 1) * w.M, -1);
  for (int b = 0; b <= w.B; ++b)
    for (int m = 0; m < w.M; ++m) {
      bool used = false;
      for (int i = 1; i < w.N && !used; ++i)
        if (i != b && x(b, i, m) > 0.5) used = true;
      if (used) {
        w.vmap[b * w.M + m] = w.np();
        w.vinv.emplace_back(b, m);
      }
    }

  for (int i = 1; i < w.N; ++i)
    for (int b = 0; b <= w.B; ++b) {
      if (b == i || y(b, i) <= 0.5) continue;
      for (int m = 0; m < w.M; ++m) {
        if (x(b, i, m) <= 0.5) continue;
        Pw::Link l;
        l.b = b;
        l.i = i;
        l.m = m;
        l.a0 = g.direct(b, i, m) * w.budget[b];
        for (int bp = 0; bp <= w.B; ++bp) {
          if (bp == b || bp == i) continue;
          for (int ip = 1; ip < w.N; ++ip) {
            if (ip == b || ip == bp || ip == i) continue;
            if (x(bp, ip, m) <= 0.5) continue;
            const double c = g.cross(b, i, bp, ip, m) * w.budget[bp];
            if (c > 0.0) l.terms.emplace_back(w.vmap[bp * w.M + m], c);
          }
        }
        w.links.push_back(std::move(l));
      }
    }
  return w;
}

double arg_q_of(const Pw& w, const Pw::Link& l, const VecX& u) {
  double s = w.noise;
  for (const auto& [v, c] : l.terms) s += c * u(v);
  return s;
}

double link_rate_of(const Pw& w, const Pw::Link& l, const VecX& u) {
  const int v = w.vmap[l.b * w.M + l.m];
  const double aq = arg_q_of(w, l, u);
  return w.W * std::log2((l.a0 * u(v) + aq) / aq);
}

double user_rate_of(const Pw& w, const VecX& u, int ue) {
  double r = 0.0;
  for (const auto& l : w.links)
    if (l.i == ue) r += link_rate_of(w, l, u);
  return r;
}

double true_objective_of(const Pw& w, const VecX& u, double rth) {
  double f = 0.0;
  for (int i = w.B + 1; i < w.N; ++i) {
    const double r = user_rate_of(w, u, i);
    f += r - kQosSlackCost * std::max(0.0, rth - r);
  }
  return f;
}

double relay_in_of(const Pw& w, const VecX& u, int s) {
  double r = 0.0;
  for (const auto& l : w.links)
    if (l.i == s) r += link_rate_of(w, l, u);
  return r;
}

double relay_out_of(const Pw& w, const VecX& u, int s) {
  double r = 0.0;
  for (const auto& l : w.links)
    if (l.b == s) r += link_rate_of(w, l, u);
  return r;
}

// halve an overloaded relay's own transmit powers until its feeder keeps up;
// unrepairable rows are dropped and flagged, vacuous ones dropped silently
void repair_rows(const Pw& w, VecX& u, std::vector<char>& dropped, bool& fallback) {
  std::vector<char> has_out(w.B + 1, 0);
  for (const auto& l : w.links)
    if (l.b >= 1) has_out[l.b] = 1;
  for (int sweep = 0; sweep < 48; ++sweep) {
    bool bad = false;
    for (int s = 1; s <= w.B; ++s) {
      if (!has_out[s] || dropped[s]) continue;
      const double in = relay_in_of(w, u, s);
      const double out = relay_out_of(w, u, s);
      if (in < kRateEps && out < kRateEps) {
        dropped[s] = 1;  // dead subtree: 0 >= 0 holds but never strictly
        continue;
      }
      if (out <= in * (1.0 - kCapMargin)) continue;
      bad = true;
      for (int m = 0; m < w.M; ++m) {
        const int v = w.vmap[s * w.M + m];
        if (v >= 0) u(v) *= 0.5;
      }
    }
    if (!bad) break;
  }
  for (int s = 1; s <= w.B; ++s) {
    if (!has_out[s] || dropped[s]) continue;
    if (relay_out_of(w, u, s) > relay_in_of(w, u, s) * (1.0 - kCapMargin) + 1e-12) {
      dropped[s] = 1;
      fallback = true;
    }
  }
}

// first-order data of the convex-side pieces at the anchor point
struct PaAnchor {
  VecX u0;
  double Q0 = 0.0;
  VecX gQ;                 // over power vars
  VecX Qi0;                // per user
  std::vector<VecX> gQi;
  VecX h20;                // per relay
  std::vector<VecX> gh2;
};

void add_q_grad(const Pw& w, const Pw::Link& l, const VecX& u, double scale, VecX& g) {
  const double aq = arg_q_of(w, l, u);
  const double s = scale * w.W / (M_LN2 * aq);
  for (const auto& [v, c] : l.terms) g(v) += s * c;
}

void add_e_grad(const Pw& w, const Pw::Link& l, const VecX& u, double scale, VecX& g) {
  const int v0 = w.vmap[l.b * w.M + l.m];
  const double ae = l.a0 * u(v0) + arg_q_of(w, l, u);
  const double s = scale * w.W / (M_LN2 * ae);
  g(v0) += s * l.a0;
  for (const auto& [v, c] : l.terms) g(v) += s * c;
}

// negated Hessian contribution of a log piece: rank one and psd
void add_log_neg_hess(const Pw& w, const Pw::Link& l, const VecX& u, bool with_direct, MatX& H) {
  VecX c = VecX::Zero(H.rows());
  double arg = arg_q_of(w, l, u);
  if (with_direct) {
    const int v0 = w.vmap[l.b * w.M + l.m];
    arg += l.a0 * u(v0);
    c(v0) += l.a0;
  }
  for (const auto& [v, k] : l.terms) c(v) += k;
  H.noalias() += (w.W / (M_LN2 * arg * arg)) * (c * c.transpose());
}

PaAnchor make_anchor(const Pw& w, const VecX& u) {
  PaAnchor a;
  a.u0 = u;
  a.gQ = VecX::Zero(w.np());
  a.Qi0 = VecX::Zero(w.K);
  a.gQi.assign(w.K, VecX::Zero(w.np()));
  a.h20 = VecX::Zero(w.B + 1);
  a.gh2.assign(w.B + 1, VecX::Zero(w.np()));
  for (const auto& l : w.links) {
    const double q = w.W * std::log2(arg_q_of(w, l, u));
    const double e = q + link_rate_of(w, l, u);
    if (l.i > w.B) {
      const int k = l.i - w.B - 1;
      a.Q0 += q;
      add_q_grad(w, l, u, 1.0, a.gQ);
      a.Qi0(k) += q;
      add_q_grad(w, l, u, 1.0, a.gQi[k]);
    }
    // h2 of relay s collects q of links into s and e of links out of s
    if (l.i >= 1 && l.i <= w.B) {
      a.h20(l.i) += q;
      add_q_grad(w, l, u, 1.0, a.gh2[l.i]);
    }
    if (l.b >= 1) {
      a.h20(l.b) += e;
      add_e_grad(w, l, u, 1.0, a.gh2[l.b]);
    }
  }
  return a;
}

ConvexProgram build_program(const Pw& w, const PaAnchor& a, double rth, double s_up,
                            const std::vector<char>& dropped) {
  ConvexProgram p;
  p.n = w.nvar();
  p.lower = VecX::Zero(p.n);
  p.upper = VecX::Constant(p.n, s_up);
  for (int v = 0; v < w.np(); ++v) p.upper(v) = 1.0;
  const double rho = kQosSlackCost;

  p.objective = [&w, &a, rho](const VecX& xv) {
    double f = -a.Q0 - a.gQ.dot(xv.head(w.np()) - a.u0);
    for (const auto& l : w.links)
      if (l.i > w.B) {
        const int v0 = w.vmap[l.b * w.M + l.m];
        f += w.W * std::log2(l.a0 * xv(v0) + arg_q_of(w, l, xv));
      }
    for (int k = 0; k < w.K; ++k) f -= rho * xv(w.np() + k);
    return f;
  };
  p.objective_grad = [&w, &a, rho](const VecX& xv) {
    VecX g = VecX::Zero(w.nvar());
    g.head(w.np()) = -a.gQ;
    for (const auto& l : w.links)
      if (l.i > w.B) add_e_grad(w, l, xv, 1.0, g);
    for (int k = 0; k < w.K; ++k) g(w.np() + k) = -rho;
    return g;
  };
  p.objective_hess = [&w](const VecX& xv) {
    MatX H = MatX::Zero(w.nvar(), w.nvar());
    for (const auto& l : w.links)
      if (l.i > w.B) add_log_neg_hess(w, l, xv, true, H);
    return H;
  };

  // per-BS power budget
  for (int b = 0; b <= w.B; ++b) {
    std::vector<int> vars;
    for (int m = 0; m < w.M; ++m)
      if (w.vmap[b * w.M + m] >= 0) vars.push_back(w.vmap[b * w.M + m]);
    if (vars.empty()) continue;
    SolverConstraint c;
    c.name = "budget_b" + std::to_string(b);
    c.value = [vars](const VecX& xv) {
      double s = 1.0;
      for (int v : vars) s -= xv(v);
      return s;
    };
    c.grad = [vars, n = p.n](const VecX&) {
      VecX g = VecX::Zero(n);
      for (int v : vars) g(v) = -1.0;
      return g;
    };
    p.ineq.push_back(std::move(c));
  }
  // soft per-user rate floor
  for (int i = w.B + 1; i < w.N; ++i) {
    const int k = i - w.B - 1, sv = w.np() + k;
    SolverConstraint c;
    c.name = "floor_ue" + std::to_string(i);
    c.value = [&w, &a, i, k, sv, rth](const VecX& xv) {
      double val = xv(sv) - rth - a.Qi0(k) - a.gQi[k].dot(xv.head(w.np()) - a.u0);
      for (const auto& l : w.links)
        if (l.i == i) {
          const int v0 = w.vmap[l.b * w.M + l.m];
          val += w.W * std::log2(l.a0 * xv(v0) + arg_q_of(w, l, xv));
        }
      return val;
    };
    c.grad = [&w, &a, i, k, sv](const VecX& xv) {
      VecX g = VecX::Zero(w.nvar());
      g.head(w.np()) = -a.gQi[k];
      for (const auto& l : w.links)
        if (l.i == i) add_e_grad(w, l, xv, 1.0, g);
      g(sv) += 1.0;
      return g;
    };
    c.hess = [&w, i](const VecX& xv) {
      MatX H = MatX::Zero(w.nvar(), w.nvar());
      for (const auto& l : w.links)
        if (l.i == i) add_log_neg_hess(w, l, xv, true, H);
      return H;
    };
    p.ineq.push_back(std::move(c));
  }
  // hard backhaul rows: concave h1 above the linearized h2
  std::vector<char> has_out(w.B + 1, 0);
  for (const auto& l : w.links)
    if (l.b >= 1) has_out[l.b] = 1;
  for (int s = 1; s <= w.B; ++s) {
    if (!has_out[s] || dropped[s]) continue;
    SolverConstraint c;
    c.name = "backhaul_s" + std::to_string(s);
    c.value = [&w, &a, s](const VecX& xv) {
      double val = -a.h20(s) - a.gh2[s].dot(xv.head(w.np()) - a.u0);
      for (const auto& l : w.links) {
        if (l.i == s) {
          const int v0 = w.vmap[l.b * w.M + l.m];
          val += w.W * std::log2(l.a0 * xv(v0) + arg_q_of(w, l, xv));
        }
        if (l.b == s) val += w.W * std::log2(arg_q_of(w, l, xv));
      }
      return val;
    };
    c.grad = [&w, &a, s](const VecX& xv) {
      VecX g = VecX::Zero(w.nvar());
      g.head(w.np()) = -a.gh2[s];
      for (const auto& l : w.links) {
        if (l.i == s) add_e_grad(w, l, xv, 1.0, g);
        if (l.b == s) add_q_grad(w, l, xv, 1.0, g);
      }
      return g;
    };
    c.hess = [&w, s](const VecX& xv) {
      MatX H = MatX::Zero(w.nvar(), w.nvar());
      for (const auto& l : w.links) {
        if (l.i == s) add_log_neg_hess(w, l, xv, true, H);
        if (l.b == s) add_log_neg_hess(w, l, xv, false, H);
      }
      return H;
    };
    p.ineq.push_back(std::move(c));
  }
  return p;
}

}  // namespace

std::vector<DcLink> dc_pieces(const GainTable& g, const MatX& y, const Tensor3& x, const MatX& P,
                              const ScenarioConfig& cfg) {
  const int B = g.num_sbs(), N = g.num_nodes(), M = g.num_subchannels();
  const double noise = cfg.noise_power_w(), W = cfg.bandwidth_hz;
  std::vector<DcLink> out;
  for (int b = 0; b <= B; ++b)
    for (int i = 1; i < N; ++i) {
      if (i == b) continue;
      for (int m = 0; m < M; ++m) {
        const double gate = y(b, i) * x(b, i, m);
        if (gate <= 0.0) continue;
        DcLink d;
        d.b = b;
        d.i = i;
        d.m = m;
        d.gate = gate;
        const double aq = interf_noise(g, x, P, b, i, m, noise);
        const double ae = g.direct(b, i, m) * P(b, m) + aq;
        d.q = gate * W * std::log2(aq);
        d.e = gate * W * std::log2(ae);
        d.grad_e = MatX::Zero(B + 1, M);
        d.grad_q = MatX::Zero(B + 1, M);
        add_interf_grad(g, x, b, i, m, gate * W / (M_LN2 * aq), d.grad_q);
        add_interf_grad(g, x, b, i, m, gate * W / (M_LN2 * ae), d.grad_e);
        d.grad_e(b, m) += gate * W / (M_LN2 * ae) * g.direct(b, i, m);
        out.push_back(std::move(d));
      }
    }
  return out;
}

PaAggregates pa_aggregates(const GainTable& g, const MatX& y, const Tensor3& x, const MatX& P,
                           const ScenarioConfig& cfg) {
  const int B = g.num_sbs(), K = g.num_ues();
  PaAggregates agg;
  agg.Ei = VecX::Zero(K);
  agg.Qi = VecX::Zero(K);
  agg.h1 = VecX::Zero(B + 1);
  agg.h2 = VecX::Zero(B + 1);
  for (const auto& d : dc_pieces(g, y, x, P, cfg)) {
    if (d.i > B) {
      agg.E += d.e;
      agg.Q += d.q;
      agg.Ei(d.i - B - 1) += d.e;
      agg.Qi(d.i - B - 1) += d.q;
    }
    if (d.i >= 1 && d.i <= B) {
      agg.h1(d.i) += d.e;
      agg.h2(d.i) += d.q;
    }
    if (d.b >= 1) {
      agg.h1(d.b) += d.q;
      agg.h2(d.b) += d.e;
    }
  }
  return agg;
}

double pa_true_objective(const GainTable& g, const MatX& y, const Tensor3& x, const MatX& P,
                         const ScenarioConfig& cfg) {
  const int B = g.num_sbs(), N = g.num_nodes();
  VecX r = VecX::Zero(N);
  for (const auto& d : dc_pieces(g, y, x, P, cfg))
    if (d.i > B) r(d.i) += d.e - d.q;
  double f = 0.0;
  for (int i = B + 1; i < N; ++i)
    f += r(i) - kQosSlackCost * std::max(0.0, cfg.min_rate_bps - r(i));
  return f;
}

PaResult run_pa(const GainTable& gains, const MatX& y, const Tensor3& x, const ScenarioConfig& cfg,
                const MatX* P_init) {
  Pw w = build_pw(gains, y, x, cfg);
  const double rth = cfg.min_rate_bps;
  const double s_up = std::max(1.0, 10.0 * rth);
  const double u_floor = 0.01 / std::max(1, w.M);

  PaResult res;
  res.P = MatX::Zero(w.B + 1, w.M);
  if (w.links.empty()) {
    res.trace.push_back(true_objective_of(w, VecX(), rth));
    return res;
  }

  // a feasible warm point is kept as-is and only ever replaced by something
  // better; the solver itself needs the floored copy below
  VecX u_raw;
  bool raw_ok = false;
  double f_raw = 0.0;
  if (P_init != nullptr) {
    u_raw.resize(w.np());
    raw_ok = true;
    for (int v = 0; v < w.np(); ++v) {
      const auto [b, m] = w.vinv[v];
      u_raw(v) = std::max(0.0, (*P_init)(b, m) / w.budget[b]);
      if ((*P_init)(b, m) < -1e-12 * w.budget[b]) raw_ok = false;
    }
    for (int b = 0; b <= w.B && raw_ok; ++b) {
      double s = 0.0;
      for (int v = 0; v < w.np(); ++v)
        if (w.vinv[v].first == b) s += u_raw(v);
      if (s > 1.0 + 1e-6) raw_ok = false;
    }
    const double rate_tol = 1e-6 * std::max(1.0, std::max(rth, cfg.bandwidth_hz));
    for (int s = 1; s <= w.B && raw_ok; ++s)
      if (relay_in_of(w, u_raw, s) < relay_out_of(w, u_raw, s) - rate_tol) raw_ok = false;
    if (raw_ok) f_raw = true_objective_of(w, u_raw, rth);
  }

  VecX u(w.np());
  for (int v = 0; v < w.np(); ++v) {
    const auto [b, m] = w.vinv[v];
    u(v) = P_init != nullptr ? (*P_init)(b, m) / w.budget[b] : kRowUse / w.M;
    u(v) = std::clamp(u(v), u_floor, 1.0);
  }
  // keep row usage strictly under budget
  for (int b = 0; b <= w.B; ++b) {
    double s = 0.0;
    for (int v = 0; v < w.np(); ++v)
      if (w.vinv[v].first == b) s += u(v);
    if (s > kRowUse) {
      const double f = kRowUse / s;
      for (int v = 0; v < w.np(); ++v)
        if (w.vinv[v].first == b) u(v) *= f;
    }
  }

  std::vector<char> dropped(w.B + 1, 0);
  repair_rows(w, u, dropped, res.fallback);
  res.trace.push_back(true_objective_of(w, u, rth));

  for (int it = 1; it <= cfg.max_pa_iters; ++it) {
    res.iters = it;
    PaAnchor a = make_anchor(w, u);
    ConvexProgram prog = build_program(w, a, rth, s_up, dropped);

    VecX start(w.nvar());
    start.head(w.np()) = u;
    for (int i = w.B + 1; i < w.N; ++i) {
      const double shortfall = std::max(0.0, rth - user_rate_of(w, u, i));
      start(w.np() + (i - w.B - 1)) = std::min(0.9 * s_up, std::max(1e-3, 1.2 * shortfall));
    }
    auto sol = solve(prog, start, cfg.kkt_tol, 400);

    double cap_slack = std::numeric_limits<double>::infinity();
    for (const auto& c : prog.ineq)
      if (c.name.rfind("backhaul_", 0) == 0) cap_slack = std::min(cap_slack, c.value(sol.x));
    res.cap_slack_trace.push_back(cap_slack);

    VecX cand = sol.x.head(w.np());
    const double f_prev = res.trace.back();
    const double f_cand = true_objective_of(w, cand, rth);
    if (f_cand < f_prev - 1e-9 * std::max(1.0, std::abs(f_prev))) break;
    u = cand;
    res.trace.push_back(std::max(f_cand, f_prev));
    if (std::abs(f_cand - f_prev) <= cfg.conv_tol * std::max(1.0, std::abs(f_prev))) break;
  }

  if (raw_ok && f_raw > res.trace.back()) {
    u = u_raw;
    res.trace.push_back(f_raw);
  }

  for (int v = 0; v < w.np(); ++v) {
    const auto [b, m] = w.vinv[v];
    res.P(b, m) = u(v) * w.budget[b];
  }
  return res;
}

}  // namespace iab
