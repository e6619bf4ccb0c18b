#include <doctest.h>

#include <cmath>
#include <memory>

#include "iab/netmodel.hpp"
#include "iab/oracle.hpp"

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

void set_gain(ChannelSet& ch, int b, int i, int m, double gain) {
  ch.links[ch.pair_index(b, i)].H[m](0, 0) = std::sqrt(gain);
}

ScenarioConfig unit_cfg(int B, int K, int M) {
  ScenarioConfig cfg;
  cfg.num_sbs = B;
  cfg.num_ues = K;
  cfg.num_subchannels = M;
  cfg.bandwidth_hz = 1.0;
  cfg.noise_density_dbm_hz = 30.0 + 10.0 * std::log10(0.5);
  cfg.min_rate_bps = 0.0;
  return cfg;
}

}  // namespace

TEST_CASE("one-user instance solved by inspection") {
  auto ch = scalar_set(1, 1, 1, 0.0);
  set_gain(*ch, 0, 1, 0, 100.0);
  set_gain(*ch, 0, 2, 0, 6.0);
  set_gain(*ch, 1, 2, 0, 3.0);
  ScenarioConfig cfg = unit_cfg(1, 1, 1);
  GainTable g(ch);
  auto res = exhaustive_solve(g, cfg, 2);

  // direct hub service at full power; relaying would need a second subchannel
  const double pm = cfg.max_power_w(0);
  CHECK(res.objective == doctest::Approx(std::log2(1.0 + 6.0 * pm / 0.5)).epsilon(1e-12));
  CHECK(res.sol.y(0, 2) == 1.0);
  CHECK(res.sol.x(0, 2, 0) == 1.0);
  CHECK(res.sol.P(0, 0) == doctest::Approx(pm));
  CHECK(res.sol.P(1, 0) == 0.0);  // ties resolved toward the lowest grid level
  CHECK(res.objective == doctest::Approx(sum_rate(g, res.sol, cfg)).epsilon(1e-12));

  auto rep = validate(g, res.sol, cfg);
  CHECK(rep.feasible);
}

TEST_CASE("two-hop chain found when only the chain has gain") {
  auto ch = scalar_set(2, 1, 2, 0.0);
  for (int m = 0; m < 2; ++m) {
    set_gain(*ch, 0, 1, m, 1000.0);
    set_gain(*ch, 1, 2, m, 1000.0);
    set_gain(*ch, 2, 3, m, 8.0);
  }
  ScenarioConfig cfg = unit_cfg(2, 1, 2);
  cfg.max_power_sbs_dbm = 30.0;  // 1 W
  GainTable g(ch);

  // both relays must be chained; the serving link reuses the first feeder's
  // subchannel, so log2(1 + 8 * 1 / 0.5) is the best any grid can do
  for (int levels : {2, 3}) {
    auto res = exhaustive_solve(g, cfg, levels);
    CHECK(res.sol.y(0, 1) == 1.0);
    CHECK(res.sol.y(1, 2) == 1.0);
    CHECK(res.sol.y(2, 3) == 1.0);
    CHECK(res.objective == doctest::Approx(std::log2(17.0)).epsilon(1e-9));
    CHECK(validate(g, res.sol, cfg).feasible);
  }
}

TEST_CASE("refining the grid never hurts") {
  auto ch = scalar_set(1, 2, 2, 0.3);
  set_gain(*ch, 0, 1, 0, 40.0);
  set_gain(*ch, 0, 2, 1, 9.0);
  set_gain(*ch, 1, 3, 1, 12.0);
  ScenarioConfig cfg = unit_cfg(1, 2, 2);
  GainTable g(ch);
  const double o2 = exhaustive_solve(g, cfg, 2).objective;
  const double o3 = exhaustive_solve(g, cfg, 3).objective;
  const double o4 = exhaustive_solve(g, cfg, 4).objective;
  CHECK(o3 >= o2 - 1e-12);
  CHECK(o4 >= o2 - 1e-12);
}

TEST_CASE("oracle dominates a handcrafted feasible point") {
  auto ch = scalar_set(1, 2, 2, 0.1);
  for (int m = 0; m < 2; ++m) {
    set_gain(*ch, 0, 1, m, 50.0);
    set_gain(*ch, 1, 2, m, 20.0);
    set_gain(*ch, 0, 3, m, 10.0);
  }
  ScenarioConfig cfg = unit_cfg(1, 2, 2);
  GainTable g(ch);

  Solution hand = Solution::zeros(1, 2, 2);
  hand.y(0, 1) = hand.y(1, 2) = hand.y(0, 3) = 1.0;
  hand.x(0, 1, 0) = 1.0;
  hand.x(1, 2, 1) = 1.0;
  hand.x(0, 3, 1) = 1.0;
  hand.P(0, 0) = cfg.max_power_w(0);
  hand.P(1, 1) = cfg.max_power_w(1);
  REQUIRE(validate(g, hand, cfg).feasible);

  auto res = exhaustive_solve(g, cfg, 2);
  CHECK(res.objective >= sum_rate(g, hand, cfg) - 1e-12);
}

TEST_CASE("enumeration guard rejects big instances") {
  auto ch = scalar_set(4, 10, 16, 1.0);
  ScenarioConfig cfg = unit_cfg(4, 10, 16);
  GainTable g(ch);
  CHECK_THROWS_AS(exhaustive_solve(g, cfg, 2), std::invalid_argument);
  CHECK_THROWS_AS(exhaustive_solve(g, cfg, 1), std::invalid_argument);
}

TEST_CASE("power polish climbs a single clean link to budget") {
  auto ch = scalar_set(0, 1, 1, 0.0);
  set_gain(*ch, 0, 1, 0, 5.0);
  ScenarioConfig cfg = unit_cfg(0, 1, 1);
  GainTable g(ch);
  Solution s = Solution::zeros(0, 1, 1);
  s.y(0, 1) = 1.0;
  s.x(0, 1, 0) = 1.0;
  s.P(0, 0) = 0.0;

  const double pm = cfg.max_power_w(0);
  Solution r = grid_refine(g, s, cfg, pm / 8.0);
  CHECK(r.P(0, 0) == doctest::Approx(pm).epsilon(1e-12));
  CHECK(sum_rate(g, r, cfg) >= sum_rate(g, s, cfg));

  // a step wider than the budget leaves the point alone
  Solution r2 = grid_refine(g, s, cfg, 2.0 * pm);
  CHECK(r2.P(0, 0) == 0.0);

  CHECK_THROWS_AS(grid_refine(g, s, cfg, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(grid_refine(g, s, cfg, -1.0), std::invalid_argument);
}

TEST_CASE("power polish keeps backhaul feasibility") {
  auto ch = scalar_set(1, 1, 2, 0.0);
  for (int m = 0; m < 2; ++m) {
    set_gain(*ch, 0, 1, m, 2.0);
    set_gain(*ch, 1, 2, m, 50.0);
  }
  ScenarioConfig cfg = unit_cfg(1, 1, 2);
  GainTable g(ch);
  Solution s = Solution::zeros(1, 1, 2);
  s.y(0, 1) = s.y(1, 2) = 1.0;
  s.x(0, 1, 0) = 1.0;
  s.x(1, 2, 1) = 1.0;
  s.P(0, 0) = cfg.max_power_w(0);
  s.P(1, 1) = 1e-4;
  REQUIRE(validate(g, s, cfg).feasible);

  Solution r = grid_refine(g, s, cfg, cfg.max_power_w(1) / 32.0);
  CHECK(sum_rate(g, r, cfg) >= sum_rate(g, s, cfg));
  CHECK(validate(g, r, cfg).feasible);
}

TEST_CASE("polish refuses an infeasible start") {
  auto ch = scalar_set(1, 1, 1, 0.0);
  set_gain(*ch, 1, 2, 0, 50.0);
  ScenarioConfig cfg = unit_cfg(1, 1, 1);
  GainTable g(ch);
  Solution s = Solution::zeros(1, 1, 1);
  s.y(0, 1) = s.y(1, 2) = 1.0;
  s.x(1, 2, 0) = 1.0;  // relay serves with no backhaul feed
  s.P(1, 0) = cfg.max_power_w(1);
  CHECK_THROWS_AS(grid_refine(g, s, cfg, 0.1), std::invalid_argument);
}
