#include <doctest.h>

#include <cmath>
#include <memory>

#include "iab/assoc.hpp"

using namespace iab;

namespace {

std::shared_ptr<ChannelSet> scalar_set(int B, int K, int M, double h = 1.0) {
  auto ch = std::make_shared<ChannelSet>();
  ch->B = B;
  ch->K = K;
  ch->M = M;
  ch->links.resize(ch->num_pairs());
  for (int b = 0; b <= B; ++b)
    for (int i = 1; i < ch->num_nodes(); ++i) {
      if (i == b) continue;
      auto& st = ch->links[ch->pair_index(b, i)];
      st.tx = b;
      st.rx = i;
      st.H.assign(M, Eigen::MatrixXcd::Constant(1, 1, h));
    }
  return ch;
}

void set_gain(ChannelSet& ch, int b, int i, double gain) {
  for (auto& H : ch.links[ch.pair_index(b, i)].H) H(0, 0) = std::sqrt(gain);
}

ScenarioConfig small_cfg(int B, int K, int M) {
  ScenarioConfig cfg;
  cfg.num_sbs = B;
  cfg.num_ues = K;
  cfg.num_subchannels = M;
  return cfg;
}

}  // namespace

TEST_CASE("edge scores reproduce the multiplier algebra") {
  // B=1, K=1: nodes 0 hub, 1 relay, 2 user
  MatX rhat = MatX::Zero(2, 3);
  rhat(0, 1) = 4.0;
  rhat(0, 2) = 3.0;
  rhat(1, 2) = 10.0;
  DualState d = DualState::ones(1, 1);
  d.lambda(0) = 1.0;
  d.mu(0) = 0.5;
  d.nu = 0.25;
  MatX X = assoc_scores(rhat, d, 1, 1);
  CHECK(X(1, 2) == doctest::Approx((1.0 + 1.0 - 0.5) * 10.0));  // 15
  CHECK(X(0, 2) == doctest::Approx(2.0 * 3.0));
  CHECK(X(0, 1) == doctest::Approx(0.5 * 4.0 + 0.25));
}

TEST_CASE("relay-to-relay scores use the multiplier difference") {
  MatX rhat = MatX::Zero(3, 4);
  rhat(1, 2) = 6.0;
  rhat(2, 1) = 5.0;
  DualState d = DualState::ones(2, 1);
  d.mu(0) = 0.8;
  d.mu(1) = 0.3;
  MatX X = assoc_scores(rhat, d, 2, 1);
  CHECK(X(1, 2) == doctest::Approx((0.3 - 0.8) * 6.0));
  CHECK(X(2, 1) == doctest::Approx((0.8 - 0.3) * 5.0));
}

TEST_CASE("parent choice is argmax with hub-first tie break") {
  MatX scores = MatX::Zero(3, 4);
  scores(0, 3) = 5.0;
  scores(1, 3) = 5.0;  // tie with the hub: hub wins
  scores(2, 3) = 4.0;
  scores(0, 2) = 1.0;
  scores(1, 2) = 2.0;  // strict winner
  scores(0, 1) = 0.0;
  scores(2, 1) = 0.0;  // tie among relays: lower id wins (the hub here)
  auto y = select_parents(scores, {}, 2);
  CHECK(y(0, 3) == 1.0);
  CHECK(y(1, 2) == 1.0);
  CHECK(y(0, 1) == 1.0);
  for (int i = 1; i < 4; ++i) {
    double s = 0.0;
    for (int b = 0; b <= 2; ++b) s += y(b, i);
    CHECK(s == 1.0);
  }
}

TEST_CASE("pins override the argmax") {
  MatX scores = MatX::Zero(2, 4);
  scores(1, 2) = 100.0;
  auto y = select_parents(scores, {-1, -1, 0, 1}, 1);
  CHECK(y(0, 2) == 1.0);  // pinned away from the high score
  CHECK(y(1, 3) == 1.0);
}

TEST_CASE("repair attaches a relay to the hub when none is") {
  MatX y = MatX::Zero(3, 4);
  y(2, 1) = 1.0;  // 1 <- 2
  y(1, 2) = 1.0;  // 2 <- 1 (mutual pair, no hub edge)
  y(0, 3) = 1.0;
  MatX scores = MatX::Zero(3, 4);
  scores(0, 1) = 7.0;  // best hub edge
  scores(0, 2) = 3.0;
  repair_tree(y, scores, {}, 2);
  CHECK(y(0, 1) == 1.0);
  CHECK(y(2, 1) == 0.0);
  CHECK(y(1, 2) == 1.0);  // chain 2 -> 1 -> 0 is now fine
}

TEST_CASE("repair breaks a cycle away from the hub edge") {
  MatX y = MatX::Zero(4, 5);
  y(0, 1) = 1.0;
  y(3, 2) = 1.0;  // 2 <- 3
  y(2, 3) = 1.0;  // 3 <- 2: cycle {2,3}
  y(1, 4) = 1.0;
  MatX scores = MatX::Zero(4, 5);
  scores(0, 2) = 1.0;
  scores(0, 3) = 2.0;  // 3 has the better hub edge
  repair_tree(y, scores, {}, 3);
  CHECK(y(0, 3) == 1.0);
  CHECK(y(2, 3) == 0.0);
  CHECK(y(3, 2) == 1.0);
  CHECK(y(0, 1) == 1.0);
}

TEST_CASE("subgradient step with normalized slacks") {
  ScenarioConfig cfg;
  cfg.min_rate_bps = 0.2;
  cfg.step_a = 1.0;
  cfg.step_b = 10.0;
  MatX rhat = MatX::Zero(2, 3);
  rhat(0, 1) = 0.8;
  rhat(0, 2) = 0.9;
  MatX y = MatX::Zero(2, 3);
  y(0, 1) = 1.0;
  y(0, 2) = 1.0;
  DualState d = DualState::ones(1, 1);
  subgradient_step(d, y, rhat, cfg, 1);
  // user slack 0.7 at step 1/11
  CHECK(d.lambda(0) == doctest::Approx(1.0 - 0.7 / 11.0));
  // relay 1 receives 0.8 and serves nothing
  CHECK(d.mu(0) == doctest::Approx(1.0 - 0.8 / 11.0));
  // exactly one relay on the hub: nu unchanged
  CHECK(d.nu == doctest::Approx(1.0));
}

TEST_CASE("multipliers are clamped at zero") {
  ScenarioConfig cfg;
  cfg.min_rate_bps = 0.0;
  cfg.step_a = 100.0;
  cfg.step_b = 10.0;
  MatX rhat = MatX::Zero(2, 3);
  rhat(0, 1) = 1.0;
  rhat(0, 2) = 1.0;
  MatX y = MatX::Zero(2, 3);
  y(0, 1) = 1.0;
  y(0, 2) = 1.0;
  DualState d = DualState::ones(1, 1);
  subgradient_step(d, y, rhat, cfg, 1);
  CHECK(d.lambda(0) == 0.0);
  CHECK(d.mu(0) == 0.0);
}

TEST_CASE("dual value upper-bounds every feasible association") {
  // hand instance: relay backhaul 0.8; users see 0.3/0.9 from the hub and
  // 0.6/0.5 from the relay
  MatX rhat = MatX::Zero(2, 4);
  rhat(0, 1) = 0.8;
  rhat(0, 2) = 0.3;
  rhat(0, 3) = 0.9;
  rhat(1, 2) = 0.6;
  rhat(1, 3) = 0.5;
  ScenarioConfig cfg;
  cfg.min_rate_bps = 0.2;
  const double min_rate = cfg.min_rate_bps;

  // brute force the four feasible association patterns
  double best = -1.0;
  for (int p2 = 0; p2 <= 1; ++p2)
    for (int p3 = 0; p3 <= 1; ++p3) {
      const double r2 = p2 ? rhat(1, 2) : rhat(0, 2);
      const double r3 = p3 ? rhat(1, 3) : rhat(0, 3);
      if (r2 < min_rate || r3 < min_rate) continue;
      double load = (p2 ? r2 : 0.0) + (p3 ? r3 : 0.0);
      if (load > rhat(0, 1)) continue;
      best = std::max(best, r2 + r3);
    }
  REQUIRE(best > 0.0);

  DualState d = DualState::ones(1, 2);
  for (int t = 1; t <= 60; ++t) {
    MatX X = assoc_scores(rhat, d, 1, 2);
    MatX y = select_parents(X, {}, 1);
    const double g = dual_objective(X, y, d, min_rate);
    CHECK(g >= best - 1e-9);
    repair_tree(y, X, {}, 1);
    subgradient_step(d, y, rhat, cfg, t);
  }
}

TEST_CASE("association prefers a strong relay path when the hub link is weak") {
  auto ch = scalar_set(1, 2, 2, 1.0);
  set_gain(*ch, 0, 2, 1e-17);  // user 2 can barely hear the hub
  set_gain(*ch, 1, 2, 1e-6);
  set_gain(*ch, 0, 1, 1e-5);   // strong feeder
  set_gain(*ch, 0, 3, 1e-6);   // user 3 is fine on the hub
  set_gain(*ch, 1, 3, 1e-17);
  GainTable gains(ch);
  auto cfg = small_cfg(1, 2, 2);
  cfg.min_rate_bps = 0.0;

  Tensor3 x(2, 4, 2);
  x(0, 1, 0) = 1.0;  // feeder and access links pre-split across subchannels
  x(1, 2, 1) = 1.0;
  x(0, 3, 1) = 1.0;
  x(0, 2, 0) = 1.0;
  MatX P = MatX::Constant(2, 2, 0.4);

  auto res = run_association(gains, x, P, cfg);
  CHECK(res.y(1, 2) == 1.0);
  CHECK(res.y(0, 3) == 1.0);
  CHECK(res.y(0, 1) == 1.0);
  CHECK(res.iters >= 1);
  CHECK(res.dual_trace.size() == static_cast<size_t>(res.iters));
}

TEST_CASE("association output is always a hub-rooted forest") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
    auto cfg = small_cfg(3, 4, 4);
    cfg.rng_seed = seed;
    auto topo = deploy(cfg, DeployMode::random, seed);
    auto ch = std::make_shared<ChannelSet>(realize_channels(topo, cfg, seed));
    GainTable gains(ch);
    Tensor3 x(4, 8, 4);
    for (int b = 0; b <= 3; ++b)
      for (int i = 1; i < 8; ++i)
        if (i != b) x(b, i, (b + i) % 4) = 1.0;
    MatX P = MatX::Constant(4, 4, 0.2);
    auto res = run_association(gains, x, P, cfg);

    Solution sol = Solution::zeros(3, 4, 4);
    sol.y = res.y;
    sol.x = x;
    sol.P = MatX::Constant(4, 4, 0.2);
    auto rep = validate(gains, sol, cfg);
    CHECK(rep.check("single_parent").pass);
    CHECK(rep.check("mbs_anchor").pass);
    CHECK(rep.cycles.empty());

    auto res2 = run_association(gains, x, P, cfg);
    CHECK((res.y - res2.y).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("pinned parents survive the full association loop") {
  auto ch = scalar_set(2, 2, 2, 1e-6);
  GainTable gains(ch);
  auto cfg = small_cfg(2, 2, 2);
  Tensor3 x(3, 5, 2);
  for (int b = 0; b <= 2; ++b)
    for (int i = 1; i < 5; ++i)
      if (i != b) x(b, i, (b + i) % 2) = 1.0;
  MatX P = MatX::Constant(3, 2, 0.3);
  std::vector<int> pins = {-1, 0, 0, 2, -1};  // user 3 forced onto relay 2
  auto res = run_association(gains, x, P, cfg, pins);
  CHECK(res.y(2, 3) == 1.0);
  CHECK(res.y(0, 1) == 1.0);
  CHECK(res.y(0, 2) == 1.0);
}
