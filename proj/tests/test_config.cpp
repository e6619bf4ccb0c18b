#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "iab/config.hpp"
#include "iab/units.hpp"

using namespace iab;

TEST_CASE("unit conversions") {
  CHECK(dbm_to_watt(30.0) == doctest::Approx(1.0));
  CHECK(dbm_to_watt(46.0) == doctest::Approx(39.8107).epsilon(1e-4));
  CHECK(watt_to_dbm(1.0) == doctest::Approx(30.0));
  CHECK(db_to_linear(3.0) == doctest::Approx(1.9953).epsilon(1e-4));
  CHECK(linear_to_db(db_to_linear(-7.3)) == doctest::Approx(-7.3));
  CHECK(noise_power_watt(-174.0, 2e6) == doctest::Approx(7.962e-15).epsilon(1e-3));
}

TEST_CASE("defaults are self-consistent") {
  ScenarioConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.max_power_w(0) == doctest::Approx(dbm_to_watt(46.0)));
  CHECK(cfg.max_power_w(1) == doctest::Approx(1.0));
  CHECK(cfg.max_power_w(3) == doctest::Approx(1.0));
  CHECK(cfg.noise_power_w() == doctest::Approx(7.962e-15).epsilon(1e-3));
}

TEST_CASE("validation rejects out-of-range values") {
  ScenarioConfig cfg;
  cfg.num_ues = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.num_sbs = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.num_subchannels = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.cell_radius_m = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.bandwidth_hz = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.min_rate_bps = -5.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.site_candidates = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("geometry and scale presets") {
  ScenarioConfig cfg;
  apply_case(cfg, 1);
  CHECK(cfg.num_sbs == 4);
  apply_case(cfg, 2);
  CHECK(cfg.num_sbs == 8);
  CHECK_THROWS_AS(apply_case(cfg, 3), std::invalid_argument);
  apply_desk_scale(cfg);
  CHECK(cfg.num_ues == 10);
  CHECK(cfg.num_subchannels == 16);
  apply_paper_scale(cfg);
  CHECK(cfg.num_ues == 30);
  CHECK(cfg.num_subchannels == 50);
}

TEST_CASE("json round trip preserves every field") {
  ScenarioConfig cfg;
  cfg.num_sbs = 7;
  cfg.num_ues = 13;
  cfg.shadow_std_nlos_db = 9.5;
  cfg.rng_seed = 424242;
  cfg.kkt_tol = 3e-7;
  auto back = config_from_json(config_to_json(cfg));
  CHECK(back.num_sbs == 7);
  CHECK(back.num_ues == 13);
  CHECK(back.shadow_std_nlos_db == doctest::Approx(9.5));
  CHECK(back.rng_seed == 424242);
  CHECK(back.kkt_tol == doctest::Approx(3e-7));
  CHECK(back.num_subchannels == cfg.num_subchannels);
}

TEST_CASE("json loading tolerates omissions and rejects unknown keys") {
  auto cfg = config_from_json("{\"num_sbs\": 2}");
  CHECK(cfg.num_sbs == 2);
  CHECK(cfg.num_ues == ScenarioConfig{}.num_ues);
  CHECK_THROWS_AS(config_from_json("{\"num_sbss\": 2}"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("not json"), std::invalid_argument);
}

TEST_CASE("config file round trip") {
  ScenarioConfig cfg;
  cfg.num_ues = 5;
  cfg.rng_seed = 99;
  const std::string path = "test_config_tmp.json";
  save_config(cfg, path);
  auto back = load_config(path);
  CHECK(back.num_ues == 5);
  CHECK(back.rng_seed == 99);
  std::remove(path.c_str());
}
