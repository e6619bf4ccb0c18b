#include "iab/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace iab {

namespace {

struct BarrierEval {
  double phi = 0.0;
  bool feasible = false;
};

// phi(x) = -t f(x) - sum ln g_j - sum ln(x-lo) - sum ln(up-x)
BarrierEval eval_phi(const ConvexProgram& p, const VecX& x, double t) {
  BarrierEval e;
  double phi = -t * p.objective(x);
  for (const auto& c : p.ineq) {
    const double g = c.value(x);
    if (!(g > 0.0)) return e;
    phi -= std::log(g);
  }
  for (int k = 0; k < p.n; ++k) {
    const double a = x(k) - p.lower(k), b = p.upper(k) - x(k);
    if (!(a > 0.0) || !(b > 0.0)) return e;
    phi -= std::log(a) + std::log(b);
  }
  e.phi = phi;
  e.feasible = true;
  return e;
}

// callbacks supply the negated Hessian of a concave function, which is psd,
// so their contribution to the barrier Hessian is always added
void add_neg_hessian(const std::function<VecX(const VecX&)>& hd,
                     const std::function<MatX(const VecX&)>& hf, const VecX& x, double w,
                     MatX& H) {
  if (hf) {
    H.noalias() += w * hf(x);
  } else if (hd) {
    H.diagonal().noalias() += w * hd(x);
  }
}

}  // namespace

SolveResult solve(const ConvexProgram& p, const VecX& start, double kkt_tol, int max_inner_iters) {
  const int n = p.n;
  if (start.size() != n || p.lower.size() != n || p.upper.size() != n)
    throw std::invalid_argument("solver: dimension mismatch");
  for (int k = 0; k < n; ++k) {
    if (!(p.lower(k) < p.upper(k)))
      throw std::invalid_argument("solver: empty box at index " + std::to_string(k));
    if (!(start(k) > p.lower(k)) || !(start(k) < p.upper(k)))
      throw std::invalid_argument("solver: start outside box at index " + std::to_string(k));
  }
  for (const auto& c : p.ineq)
    if (!(c.value(start) > 0.0))
      throw std::invalid_argument("solver: start violates constraint '" + c.name + "'");
  const int neq = static_cast<int>(p.eq_A.rows());
  if (neq > 0 && (p.eq_A.cols() != n || p.eq_b.size() != neq))
    throw std::invalid_argument("solver: equality dimension mismatch");
  if (neq > 0) {
    const double r = (p.eq_A * start - p.eq_b).cwiseAbs().maxCoeff();
    if (r > 1e-8 * std::max(1.0, p.eq_b.cwiseAbs().maxCoeff()))
      throw std::invalid_argument("solver: start violates equality constraints");
  }

  const double m_total = static_cast<double>(p.ineq.size()) + 2.0 * n;
  const double f0 = p.objective(start);
  const double obj_scale = std::max(1.0, std::abs(f0));
  const double gap_target = kkt_tol * obj_scale;
  const double mu = 25.0;
  double t = std::max(m_total / (0.05 * obj_scale), m_total / (gap_target * 1e6));

  VecX x = start;
  int steps = 0;
  bool limit_hit = false;

  while (true) {
    // centering at fixed t
    for (;;) {
      if (steps >= max_inner_iters) {
        limit_hit = true;
        break;
      }
      VecX grad = -t * p.objective_grad(x);
      MatX H = MatX::Zero(n, n);
      add_neg_hessian(p.objective_hess_diag, p.objective_hess, x, t, H);
      for (const auto& c : p.ineq) {
        const double g = c.value(x);
        const VecX gg = c.grad(x);
        grad.noalias() -= gg / g;
        H.selfadjointView<Eigen::Lower>().rankUpdate(gg, 1.0 / (g * g));
        add_neg_hessian(c.hess_diag, c.hess, x, 1.0 / g, H);
      }
      for (int k = 0; k < n; ++k) {
        const double a = x(k) - p.lower(k), b = p.upper(k) - x(k);
        grad(k) += -1.0 / a + 1.0 / b;
        H(k, k) += 1.0 / (a * a) + 1.0 / (b * b);
      }
      // LLT below reads the lower triangle only, so the rank updates above
      // never need symmetrizing

      // Newton direction (equality-preserving when equalities are present)
      VecX dx;
      Eigen::LLT<MatX> llt(H);
      double ridge = 1e-12 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
      while (llt.info() != Eigen::Success) {
        MatX Hr = H;
        Hr.diagonal().array() += ridge;
        llt.compute(Hr);
        ridge *= 10.0;
        if (ridge > 1e20) throw std::runtime_error("solver: hessian factorization failed");
      }
      if (neq == 0) {
        dx = llt.solve(-grad);
      } else {
        const MatX HiAt = llt.solve(p.eq_A.transpose());
        const VecX Hig = llt.solve(-grad);
        const MatX S = p.eq_A * HiAt;
        const VecX wdual = S.ldlt().solve(p.eq_A * Hig);
        dx = Hig - HiAt * wdual;
      }
      const double decrement2 = -grad.dot(dx);
      if (decrement2 * 0.5 <= 1e-9) break;

      // backtrack into the domain, then Armijo
      double alpha = 1.0;
      BarrierEval cur = eval_phi(p, x, t);
      BarrierEval trial;
      for (int it = 0; it < 90; ++it) {
        trial = eval_phi(p, x + alpha * dx, t);
        if (trial.feasible &&
            trial.phi <= cur.phi + 0.25 * alpha * grad.dot(dx) + 1e-12 * std::abs(cur.phi))
          break;
        alpha *= 0.5;
      }
      if (!trial.feasible) break;
      x += alpha * dx;
      ++steps;
      if (alpha < 1e-12) break;
    }
    if (limit_hit) break;
    if (m_total / t <= gap_target) break;
    t = std::min(t * mu, m_total / gap_target * 1.0000001);
  }

  SolveResult res;
  const double f_final = p.objective(x);
  if (f_final >= f0) {
    res.x = x;
    res.objective = f_final;
  } else {
    // the start was already within the final duality gap of the optimum
    res.x = start;
    res.objective = f0;
  }
  res.status = limit_hit ? SolveStatus::iteration_limit : SolveStatus::converged;
  double eqviol = 0.0;
  if (neq > 0) eqviol = (p.eq_A * res.x - p.eq_b).cwiseAbs().maxCoeff();
  res.kkt_residual = std::max(m_total / t / obj_scale, eqviol);
  res.newton_steps = steps;
  return res;
}

}  // namespace iab
