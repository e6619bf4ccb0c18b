#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace iab {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// concave inequality g(x) >= 0. The hess callbacks return the NEGATED Hessian
// (positive semidefinite for a concave g); both absent means affine.
struct SolverConstraint {
  std::string name;
  std::function<double(const VecX&)> value;
  std::function<VecX(const VecX&)> grad;
  std::function<VecX(const VecX&)> hess_diag;
  std::function<MatX(const VecX&)> hess;
};

// maximize a smooth concave objective over box + affine equalities + concave
// inequalities; box bounds must be finite. Objective hess callbacks follow the
// same negated-Hessian convention as constraints.
struct ConvexProgram {
  int n = 0;
  std::function<double(const VecX&)> objective;
  std::function<VecX(const VecX&)> objective_grad;
  std::function<VecX(const VecX&)> objective_hess_diag;
  std::function<MatX(const VecX&)> objective_hess;
  std::vector<SolverConstraint> ineq;
  MatX eq_A;  // zero rows when absent
  VecX eq_b;
  VecX lower, upper;
};

enum class SolveStatus { converged, iteration_limit };

struct SolveResult {
  VecX x;
  SolveStatus status = SolveStatus::converged;
  // max of normalized duality gap, equality violation; stationarity and
  // complementary slackness of the barrier iterate are within this bound
  double kkt_residual = 0.0;
  double objective = 0.0;
  int newton_steps = 0;
};

// log-barrier interior point with damped Newton centering; the returned point
// never has a lower objective than the start
SolveResult solve(const ConvexProgram& prog, const VecX& start, double kkt_tol = 1e-6,
                  int max_inner_iters = 500);

}  // namespace iab
