#include "iab/assoc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iab {

namespace {
constexpr double kInvalid = -1e300;
}

DualState DualState::ones(int B, int K) {
  DualState d;
  d.lambda = VecX::Ones(K);
  d.mu = VecX::Ones(B);
  d.nu = 1.0;
  return d;
}

MatX effective_rates(const GainTable& gains, const Tensor3& x, const MatX& P,
                     const ScenarioConfig& cfg) {
  const int B = gains.num_sbs(), N = gains.num_nodes(), M = gains.num_subchannels();
  MatX rhat = MatX::Zero(B + 1, N);
  for (int b = 0; b <= B; ++b)
    for (int i = 1; i < N; ++i) {
      if (i == b) continue;
      double r = 0.0;
      for (int m = 0; m < M; ++m)
        if (x(b, i, m) > 0.0) r += x(b, i, m) * link_rate(gains, x, P, b, i, m, cfg);
      rhat(b, i) = r;
    }
  return rhat;
}

MatX assoc_scores(const MatX& rhat, const DualState& d, int B, int K) {
  const int N = B + K + 1;
  MatX X = MatX::Constant(B + 1, N, kInvalid);
  for (int i = 1; i <= B; ++i) {
    X(0, i) = d.mu(i - 1) * rhat(0, i) + d.nu;
    for (int b = 1; b <= B; ++b)
      if (b != i) X(b, i) = (d.mu(i - 1) - d.mu(b - 1)) * rhat(b, i);
  }
  for (int i = B + 1; i < N; ++i) {
    const double lam = d.lambda(i - B - 1);
    X(0, i) = (1.0 + lam) * rhat(0, i);
    for (int b = 1; b <= B; ++b) X(b, i) = (1.0 + lam - d.mu(b - 1)) * rhat(b, i);
  }
  return X;
}

MatX select_parents(const MatX& scores, const std::vector<int>& pins, int B) {
  const int N = static_cast<int>(scores.cols());
  MatX y = MatX::Zero(B + 1, N);
  for (int i = 1; i < N; ++i) {
    if (!pins.empty() && pins[i] >= 0) {
      y(pins[i], i) = 1.0;
      continue;
    }
    int best = 0;
    double best_score = scores(0, i);
    for (int b = 1; b <= B; ++b) {
      if (b == i) continue;
      if (scores(b, i) > best_score) best_score = scores(b, i), best = b;
    }
    y(best, i) = 1.0;
  }
  return y;
}

void repair_tree(MatX& y, const MatX& scores, const std::vector<int>& pins, int B) {
  const int N = static_cast<int>(y.cols());
  auto parent = [&](int i) {
    for (int b = 0; b <= B; ++b)
      if (y(b, i) > 0.5) return b;
    return -1;
  };
  auto movable = [&](int i) { return pins.empty() || pins[i] < 0; };
  auto reattach = [&](int i) {
    for (int b = 0; b <= B; ++b) y(b, i) = 0.0;
    y(0, i) = 1.0;
  };

  // hub anchor
  double on_hub = 0.0;
  for (int b = 1; b <= B; ++b) on_hub += y(0, b);
  if (on_hub < 0.5) {
    int pick = -1;
    for (int b = 1; b <= B; ++b)
      if (movable(b) && (pick < 0 || scores(0, b) > scores(0, pick))) pick = b;
    if (pick > 0) reattach(pick);
  }
  // parent cycles: each pass pins one member of each cycle to the hub
  for (int round = 0; round < B + 1; ++round) {
    bool found = false;
    for (int start = 1; start <= B; ++start) {
      std::vector<char> seen(N, 0);
      std::vector<int> path;
      int cur = start;
      while (cur > 0 && cur <= B && !seen[cur]) {
        seen[cur] = 1;
        path.push_back(cur);
        cur = parent(cur);
      }
      if (cur > 0 && cur <= B) {
        auto it = std::find(path.begin(), path.end(), cur);
        int pick = -1;
        for (auto p = it; p != path.end(); ++p)
          if (movable(*p) && (pick < 0 || scores(0, *p) > scores(0, pick))) pick = *p;
        if (pick > 0) {
          reattach(pick);
          found = true;
        }
      }
    }
    if (!found) break;
  }
}

double dual_objective(const MatX& scores, const MatX& y, const DualState& d, double min_rate) {
  const int B = static_cast<int>(d.mu.size());
  const int N = static_cast<int>(y.cols());
  double g = 0.0;
  for (int i = 1; i < N; ++i)
    for (int b = 0; b <= B; ++b)
      if (y(b, i) > 0.5) g += scores(b, i);
  g -= d.lambda.sum() * min_rate;
  g -= d.nu;
  return g;
}

void subgradient_step(DualState& d, const MatX& y, const MatX& rhat, const ScenarioConfig& cfg,
                      int t) {
  const int B = static_cast<int>(d.mu.size());
  const int K = static_cast<int>(d.lambda.size());
  const int N = B + K + 1;
  const double delta = cfg.step_a / (cfg.step_b + t);
  // normalize rate-valued slacks so step sizes are geometry-independent
  const double rs = std::max(1.0, std::max(rhat.maxCoeff(), cfg.min_rate_bps));

  for (int i = B + 1; i < N; ++i) {
    double served = 0.0;
    for (int b = 0; b <= B; ++b)
      if (y(b, i) > 0.5) served += rhat(b, i);
    const double slack = (served - cfg.min_rate_bps) / rs;
    d.lambda(i - B - 1) = std::max(0.0, d.lambda(i - B - 1) - delta * slack);
  }
  for (int s = 1; s <= B; ++s) {
    double in = 0.0, out = 0.0;
    for (int b = 0; b <= B; ++b)
      if (b != s && y(b, s) > 0.5) in += rhat(b, s);
    for (int i = 1; i < N; ++i)
      if (i != s && y(s, i) > 0.5) out += rhat(s, i);
    const double slack = (in - out) / rs;
    d.mu(s - 1) = std::max(0.0, d.mu(s - 1) - delta * slack);
  }
  double on_hub = 0.0;
  for (int b = 1; b <= B; ++b) on_hub += y(0, b);
  d.nu = std::max(0.0, d.nu - delta * (on_hub - 1.0));
}

AssocResult run_association(const GainTable& gains, const Tensor3& x, const MatX& P,
                            const ScenarioConfig& cfg, const std::vector<int>& pins) {
  const int B = gains.num_sbs(), K = gains.num_ues(), N = gains.num_nodes();
  if (!pins.empty() && static_cast<int>(pins.size()) != N)
    throw std::invalid_argument("assoc: pins size must match node count");

  const MatX rhat = effective_rates(gains, x, P, cfg);
  DualState d = DualState::ones(B, K);

  AssocResult res;
  double best_primal = -1.0;
  MatX prev_y;
  for (int t = 1; t <= cfg.max_assoc_iters; ++t) {
    const MatX X = assoc_scores(rhat, d, B, K);
    MatX y = select_parents(X, pins, B);
    res.dual_trace.push_back(dual_objective(X, y, d, cfg.min_rate_bps));
    repair_tree(y, X, pins, B);

    double primal = 0.0;
    for (int i = B + 1; i < N; ++i)
      for (int b = 0; b <= B; ++b)
        if (y(b, i) > 0.5) primal += rhat(b, i);
    if (primal > best_primal) {
      best_primal = primal;
      res.y = y;
    }

    const DualState before = d;
    subgradient_step(d, y, rhat, cfg, t);
    res.iters = t;

    double move = std::abs(d.nu - before.nu);
    if (K > 0) move = std::max(move, (d.lambda - before.lambda).cwiseAbs().maxCoeff());
    if (B > 0) move = std::max(move, (d.mu - before.mu).cwiseAbs().maxCoeff());
    const bool same_y = prev_y.size() > 0 && (y - prev_y).cwiseAbs().maxCoeff() < 0.5;
    prev_y = y;
    if (same_y && move < cfg.conv_tol) break;
  }
  res.duals = d;
  return res;
}

}  // namespace iab
