#include <doctest.h>

#include <cmath>
#include <set>

#include "iab/topology.hpp"

using namespace iab;

namespace {
ScenarioConfig desk() {
  ScenarioConfig cfg;
  cfg.num_sbs = 4;
  cfg.num_ues = 10;
  cfg.num_subchannels = 8;
  return cfg;
}
}  // namespace

TEST_CASE("fixed deployment places distinct SBSs inside the cell") {
  auto topo = deploy(desk(), DeployMode::fixed);
  REQUIRE(topo.num_sbs() == 4);
  std::set<std::pair<double, double>> uniq;
  for (const auto& p : topo.sbs) {
    CHECK(p.norm() < 350.0);
    uniq.insert({p.x(), p.y()});
  }
  CHECK(uniq.size() == 4);
}

TEST_CASE("config rejects an empty network") {
  ScenarioConfig cfg = desk();
  cfg.num_ues = 0;
  CHECK_THROWS_AS(deploy(cfg, DeployMode::fixed), std::invalid_argument);
  cfg = desk();
  cfg.num_sbs = 0;
  CHECK_THROWS_AS(deploy(cfg, DeployMode::fixed), std::invalid_argument);
  cfg = desk();
  cfg.cell_radius_m = 0.0;
  CHECK_THROWS_AS(deploy(cfg, DeployMode::fixed), std::invalid_argument);
}

TEST_CASE("random UE positions are uniform in the disk") {
  // mean distance from the center of a uniform disk draw is 2/3 of the radius
  ScenarioConfig cfg = desk();
  cfg.num_ues = 1000;
  cfg.rng_seed = 7;
  auto topo = deploy(cfg, DeployMode::random);
  double mean = 0.0;
  for (const auto& p : topo.ue) {
    CHECK(p.norm() <= 350.0);
    mean += p.norm();
  }
  mean /= topo.num_ues();
  const double expect = 2.0 / 3.0 * 350.0;
  CHECK(std::abs(mean - expect) < 0.05 * expect);
}

TEST_CASE("UEs keep a 1 m clearance from every BS") {
  ScenarioConfig cfg = desk();
  cfg.num_ues = 500;
  auto topo = deploy(cfg, DeployMode::random);
  for (int i = topo.num_bs(); i < topo.num_nodes(); ++i)
    for (int b = 0; b < topo.num_bs(); ++b) CHECK(distance(topo, b, i) >= 1.0);
}

TEST_CASE("distance is Euclidean and symmetric") {
  ScenarioConfig cfg = desk();
  cfg.num_ues = 1;
  auto topo = deploy(cfg, DeployMode::fixed);
  topo.ue[0] = {3.0, 4.0};
  CHECK(distance(topo, 0, topo.num_bs()) == doctest::Approx(5.0));

  auto t2 = deploy(desk(), DeployMode::random);
  for (int b = 1; b < t2.num_bs(); ++b)
    for (int i = 1; i < t2.num_bs(); ++i) {
      if (i == b) continue;
      CHECK(distance(t2, b, i) == doctest::Approx(distance(t2, i, b)));
    }
}

TEST_CASE("distance rejects a node paired with itself") {
  auto topo = deploy(desk(), DeployMode::fixed);
  CHECK_THROWS_AS(distance(topo, 1, 1), std::invalid_argument);
}

TEST_CASE("deployment is deterministic in config and trial index") {
  ScenarioConfig cfg = desk();
  cfg.rng_seed = 42;
  auto a = deploy(cfg, DeployMode::random, 3);
  auto b = deploy(cfg, DeployMode::random, 3);
  REQUIRE(a.num_ues() == b.num_ues());
  for (int k = 0; k < a.num_ues(); ++k) {
    CHECK(a.ue[k].x() == b.ue[k].x());
    CHECK(a.ue[k].y() == b.ue[k].y());
  }
  auto c = deploy(cfg, DeployMode::random, 4);
  bool same = true;
  for (int k = 0; k < a.num_ues(); ++k) same = same && a.ue[k] == c.ue[k];
  CHECK_FALSE(same);
}

TEST_CASE("every UE sees a BS within twice the cell radius") {
  ScenarioConfig cfg = desk();
  cfg.num_ues = 200;
  auto topo = deploy(cfg, DeployMode::random, 11);
  for (int i = topo.num_bs(); i < topo.num_nodes(); ++i) {
    double best = 1e300;
    for (int b = 0; b < topo.num_bs(); ++b) best = std::min(best, distance(topo, b, i));
    CHECK(best <= 2.0 * cfg.cell_radius_m);
  }
}
