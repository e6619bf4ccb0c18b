#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include <json.hpp>

#include "iab/experiments.hpp"
#include "iab/oracle.hpp"
#include "iab/topology.hpp"

using namespace iab;

namespace {

ScenarioConfig tiny_cfg(int B, int K, int M) {
  ScenarioConfig cfg;
  cfg.num_sbs = B;
  cfg.num_ues = K;
  cfg.num_subchannels = M;
  cfg.mbs_antennas = 8;
  cfg.sbs_antennas = 4;
  cfg.ue_antennas = 2;
  cfg.nlos_paths = 3;
  cfg.min_rate_bps = 1e5;
  cfg.rng_seed = 7;
  return cfg;
}

GainTable make_gains(const ScenarioConfig& cfg, std::uint64_t trial = 0) {
  const Topology topo = deploy(cfg, DeployMode::random, trial);
  auto ch = std::make_shared<const ChannelSet>(realize_channels(topo, cfg, trial));
  return GainTable(ch);
}

void check_nondecreasing(const std::vector<double>& tr) {
  REQUIRE(!tr.empty());
  for (size_t i = 1; i < tr.size(); ++i)
    CHECK(tr[i] >= tr[i - 1] - 1e-6 * std::max(1.0, std::abs(tr[i - 1])));
}

bool structural_ok(const ConstraintReport& rep) {
  for (const auto& c : rep.checks)
    if (!c.pass && c.name != "qos") return false;
  return true;
}

}  // namespace

TEST_CASE("scheme and axis names round trip") {
  for (Scheme s : {Scheme::proposed, Scheme::sh_max_sinr, Scheme::mh_max_sinr, Scheme::sh_prop,
                   Scheme::direct_access})
    CHECK(scheme_from_name(scheme_name(s)) == s);
  for (SweepAxis a : {SweepAxis::num_ues, SweepAxis::min_rate, SweepAxis::num_sbs})
    CHECK(axis_from_name(axis_name(a)) == a);
  CHECK_THROWS_AS(scheme_from_name("bogus"), std::invalid_argument);
  CHECK_THROWS_AS(axis_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("direct access attaches everything to the hub") {
  const MatX y = direct_access_y(3, 5);
  REQUIRE(y.rows() == 4);
  REQUIRE(y.cols() == 9);
  for (int i = 1; i < 9; ++i) {
    CHECK(y(0, i) == 1.0);
    for (int b = 1; b <= 3; ++b) CHECK(y(b, i) == 0.0);
  }
}

TEST_CASE("spread allocation stays inside the relaxed rows") {
  const int B = 3, K = 4, M = 2, N = B + K + 1;
  const Tensor3 x = spread_allocation(B, K, M);
  for (int b = 0; b <= B; ++b)
    for (int m = 0; m < M; ++m) {
      double row = 0.0;
      for (int i = 1; i < N; ++i)
        if (i != b) row += x(b, i, m);
      CHECK(row <= 1.0 + 1e-12);
      CHECK(row > 0.0);
    }
  for (int s = 1; s <= B; ++s)
    for (int m = 0; m < M; ++m) {
      double load = 0.0;
      for (int b = 0; b <= B; ++b)
        if (b != s) load += x(b, s, m);
      for (int i = 1; i < N; ++i)
        if (i != s) load += x(s, i, m);
      CHECK(load <= 1.0 + 1e-12);
    }
  // every candidate edge has support so association scoring can rank it
  for (int b = 0; b <= B; ++b)
    for (int i = 1; i < N; ++i)
      if (i != b) CHECK(x(b, i, 0) > 0.0);
}

TEST_CASE("uniform power fills each budget exactly") {
  const ScenarioConfig cfg = tiny_cfg(2, 3, 4);
  const MatX P = uniform_power(cfg, 2, 4);
  for (int b = 0; b <= 2; ++b) {
    CHECK(P.row(b).sum() == doctest::Approx(cfg.max_power_w(b)).epsilon(1e-12));
    CHECK(P.row(b).minCoeff() == doctest::Approx(P.row(b).maxCoeff()));
  }
}

TEST_CASE("greedy allocation is orthogonal when it can be and duplex-safe") {
  const ScenarioConfig cfg = tiny_cfg(2, 3, 4);
  const GainTable gains = make_gains(cfg);
  const int B = 2, K = 3, M = 4, N = B + K + 1;

  SUBCASE("direct tree") {
    const MatX y = direct_access_y(B, K);
    const Tensor3 x = greedy_orthogonal_x(gains, y, cfg);
    int used = 0;
    for (int m = 0; m < M; ++m) {
      double col = 0.0;
      for (int b = 0; b <= B; ++b)
        for (int i = 1; i < N; ++i)
          if (i != b) col += x(b, i, m);
      CHECK(col <= 1.0 + 1e-12);  // three links, four subchannels: no reuse needed
      if (col > 0.5) ++used;
    }
    CHECK(used == K);
    for (int i = B + 1; i < N; ++i) {
      double tot = 0.0;
      for (int m = 0; m < M; ++m) tot += x(0, i, m);
      CHECK(tot == 1.0);
    }
    // idle feeders get nothing
    for (int s = 1; s <= B; ++s)
      for (int m = 0; m < M; ++m) CHECK(x(0, s, m) == 0.0);
  }

  SUBCASE("relay tree keeps the duplex rows") {
    MatX y = MatX::Zero(B + 1, N);
    y(0, 1) = 1.0;
    y(0, 2) = 1.0;
    y(1, B + 1) = 1.0;  // first user behind the relay
    y(0, B + 2) = 1.0;
    y(0, B + 3) = 1.0;
    const Tensor3 x = greedy_orthogonal_x(gains, y, cfg);
    for (int m = 0; m < M; ++m) {
      double tx1 = 0.0, rx1 = 0.0;
      for (int i = 1; i < N; ++i)
        if (i != 1) tx1 += x(1, i, m);
      for (int b = 0; b <= B; ++b)
        if (b != 1) rx1 += x(b, 1, m);
      CHECK(tx1 + rx1 <= 1.0 + 1e-12);
    }
    double feeder = 0.0, serving = 0.0;
    for (int m = 0; m < M; ++m) feeder += x(0, 1, m), serving += x(1, B + 1, m);
    CHECK(feeder == 1.0);
    CHECK(serving == 1.0);
  }
}

TEST_CASE("max SNR association pins and repairs trees") {
  const ScenarioConfig cfg = tiny_cfg(3, 4, 4);
  const GainTable gains = make_gains(cfg);
  const int B = 3, K = 4, N = B + K + 1;
  const MatX ysh = max_sinr_association(gains, cfg, false);
  const MatX ymh = max_sinr_association(gains, cfg, true);
  for (int s = 1; s <= B; ++s) CHECK(ysh(0, s) == 1.0);
  for (int i = B + 1; i < N; ++i)
    for (int b = 0; b <= B; ++b) CHECK(ysh(b, i) == ymh(b, i));
  for (const MatX* y : {&ysh, &ymh}) {
    Solution sol = Solution::zeros(B, K, cfg.num_subchannels);
    sol.y = *y;
    sol.x = greedy_orthogonal_x(gains, *y, cfg);
    sol.P = uniform_power(cfg, B, cfg.num_subchannels);
    const ConstraintReport rep = validate(gains, sol, cfg);
    CHECK(rep.check("single_parent").pass);
    CHECK(rep.check("mbs_anchor").pass);
    CHECK(rep.check("no_two_cycle").pass);
    CHECK(rep.check("one_link_per_subchannel").pass);
    CHECK(rep.check("half_duplex").pass);
  }
  // user rows really follow the interference-free SNR argmax
  const double noise = cfg.noise_power_w();
  for (int i = B + 1; i < N; ++i) {
    int arg = 0;
    double best = -1.0;
    for (int b = 0; b <= B; ++b) {
      const double snr = gains.direct(b, i, 0) * cfg.max_power_w(b) / noise;
      if (snr > best) best = snr, arg = b;
    }
    CHECK(ysh(arg, i) == 1.0);
  }
}

TEST_CASE("joint run converges, stays monotone, and dominates direct access") {
  const ScenarioConfig cfg = tiny_cfg(2, 3, 4);
  const GainTable gains = make_gains(cfg);
  const JointResult direct = run_scheme(gains, cfg, Scheme::direct_access);
  const JointResult joint = run_scheme(gains, cfg, Scheme::proposed);

  check_nondecreasing(direct.trace);
  check_nondecreasing(joint.trace);
  CHECK(joint.sum_rate_bps > 0.0);
  CHECK(joint.converged);
  CHECK(joint.outer_iters <= cfg.max_outer_iters);
  CHECK(joint.sum_rate_bps >= direct.sum_rate_bps - 1e-9);
  CHECK(joint.sum_rate_bps == doctest::Approx(sum_rate(gains, joint.sol, cfg)).epsilon(1e-12));
  CHECK(structural_ok(validate(gains, joint.sol, cfg)));
  // the joint run starts by polishing the direct tree, so its trace begins
  // with the direct run's trace, bit for bit
  REQUIRE(joint.trace.size() >= direct.trace.size());
  for (size_t i = 0; i < direct.trace.size(); ++i) CHECK(joint.trace[i] == direct.trace[i]);
  CHECK(joint.times.sa_s > 0.0);
  CHECK(joint.times.pa_s > 0.0);
  CHECK(joint.times.assoc_s > 0.0);
  CHECK(direct.times.assoc_s == 0.0);
}

TEST_CASE("runs are deterministic") {
  const ScenarioConfig cfg = tiny_cfg(2, 3, 4);
  const GainTable gains = make_gains(cfg);
  const JointResult a = run_scheme(gains, cfg, Scheme::proposed);
  const JointResult b = run_scheme(gains, cfg, Scheme::proposed);
  CHECK(a.sum_rate_bps == b.sum_rate_bps);
  REQUIRE(a.trace.size() == b.trace.size());
  for (size_t i = 0; i < a.trace.size(); ++i) CHECK(a.trace[i] == b.trace[i]);
  CHECK((a.sol.P - b.sol.P).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-user instance lands within five percent of the oracle") {
  ScenarioConfig cfg = tiny_cfg(1, 1, 1);
  cfg.min_rate_bps = 0.0;
  const GainTable gains = make_gains(cfg);
  const OracleResult oracle = exhaustive_solve(gains, cfg, 9);
  const Solution refined =
      grid_refine(gains, oracle.sol, cfg, cfg.max_power_w(1) / 256.0);
  const double ref = std::max(oracle.objective, sum_rate(gains, refined, cfg));
  const JointResult joint = run_joint(gains, cfg);
  CHECK(joint.sum_rate_bps >= 0.95 * ref);
  CHECK(joint.sum_rate_bps <= ref * (1.0 + 1e-9) + 1e-6);
  CHECK(validate(gains, joint.sol, cfg).feasible);
}

TEST_CASE("los fractions count tree links") {
  const ScenarioConfig cfg = tiny_cfg(3, 4, 4);
  const GainTable gains = make_gains(cfg);
  const int B = 3, K = 4, N = B + K + 1;
  const MatX y = max_sinr_association(gains, cfg, true);
  int bl = 0, al = 0;
  for (int s = 1; s <= B; ++s)
    for (int b = 0; b <= B; ++b)
      if (b != s && y(b, s) > 0.5 && gains.los(b, s)) ++bl;
  for (int i = B + 1; i < N; ++i)
    for (int b = 0; b <= B; ++b)
      if (y(b, i) > 0.5 && gains.los(b, i)) ++al;
  CHECK(backhaul_los_fraction(gains, y) == doctest::Approx(bl / double(B)));
  CHECK(access_los_fraction(gains, y) == doctest::Approx(al / double(K)));
}

TEST_CASE("monte carlo pairs schemes on one realization and validates") {
  const ScenarioConfig cfg = tiny_cfg(2, 3, 4);
  const std::vector<Scheme> schemes = {Scheme::direct_access, Scheme::proposed};
  const auto res = monte_carlo(cfg, schemes, 2);
  REQUIRE(res.size() == 4);
  for (int t = 0; t < 2; ++t) {
    const TrialResult& d = res[t * 2];
    const TrialResult& p = res[t * 2 + 1];
    CHECK(d.scheme == Scheme::direct_access);
    CHECK(p.scheme == Scheme::proposed);
    CHECK(d.seed == static_cast<std::uint64_t>(t));
    CHECK(p.seed == static_cast<std::uint64_t>(t));
    CHECK(d.report.feasible);
    CHECK(p.report.feasible);
    CHECK(p.sum_rate_bps >= d.sum_rate_bps - 1e-9);
    CHECK(!p.trace.empty());
    CHECK(p.ue_rates.size() == 3);
    CHECK(p.ue_rates.minCoeff() >= cfg.min_rate_bps - 1e-3);
    const GainTable gains = make_gains(cfg, t);  // same stream as inside the campaign
    CHECK(p.sum_rate_bps == doctest::Approx(sum_rate(gains, p.sol, cfg)).epsilon(1e-12));
    CHECK(p.ue_rates.sum() == doctest::Approx(p.sum_rate_bps).epsilon(1e-9));
  }
}

TEST_CASE("sweep aggregates match a direct campaign and are byte stable") {
  const ScenarioConfig cfg = tiny_cfg(2, 3, 4);
  const std::vector<Scheme> schemes = {Scheme::direct_access};
  const auto rows1 = sweep(cfg, SweepAxis::num_ues, {3.0}, schemes, 2);
  const auto rows2 = sweep(cfg, SweepAxis::num_ues, {3.0}, schemes, 2);
  REQUIRE(rows1.size() == 1);
  CHECK(rows1[0].value == 3.0);
  CHECK(rows1[0].n == 2);
  const auto res = monte_carlo(cfg, schemes, 2);
  const double mean = 0.5 * (res[0].sum_rate_bps + res[1].sum_rate_bps);
  CHECK(rows1[0].mean_bps == doctest::Approx(mean).epsilon(1e-12));
  CHECK(results_csv(rows1) == results_csv(rows2));
  CHECK(results_csv(rows1).rfind("# results-schema 1\n", 0) == 0);
  CHECK_THROWS_AS(sweep(cfg, SweepAxis::num_ues, {}, schemes, 1), std::invalid_argument);
}

TEST_CASE("csv and meta writers emit the documented shapes") {
  const std::vector<double> tr = {1.0, 2.0, 2.5};
  const std::string t = trace_csv(tr);
  CHECK(std::count(t.begin(), t.end(), '\n') == 5);
  CHECK(t.rfind("# trace-schema 1\nstage,sum_rate_bps\n", 0) == 0);

  const ScenarioConfig cfg = tiny_cfg(2, 3, 4);
  const std::string meta = meta_json(cfg, {Scheme::proposed}, "num_ues=3", 2, 1.5);
  const auto j = nlohmann::json::parse(meta);
  CHECK(j["schema"] == 1);
  CHECK(j["config"]["num_ues"] == 3);
  CHECK(j["schemes"][0] == "proposed");
  CHECK(j["trials"] == 2);
  CHECK(j["sbs_positions"].get<std::string>().find("fixed") != std::string::npos);
}

TEST_CASE("bench scaling reports one row per size with the predicted factors") {
  ScenarioConfig cfg = tiny_cfg(2, 3, 4);
  const auto rows = bench_scaling(cfg, {{2, 3, 4}});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].size.B == 2);
  CHECK(rows[0].sa_pred == doctest::Approx(2.0 * 2 * 4 + 4.0 * 2 * 4 + 3.0 * 4));
  CHECK(rows[0].ao_pred == doctest::Approx(2.0 * 3 + 3));
  CHECK(rows[0].times.sa_s >= 0.0);
  const std::string csv = bench_csv(rows);
  CHECK(csv.rfind("# bench-schema 1\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
