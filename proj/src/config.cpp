#include "iab/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace iab {

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (num_sbs < 1) fail("num_sbs must be >= 1");
  if (num_ues < 1) fail("num_ues must be >= 1");
  if (num_subchannels < 1) fail("num_subchannels must be >= 1");
  if (mbs_antennas < 1 || sbs_antennas < 1 || ue_antennas < 1) fail("antenna counts must be >= 1");
  if (nlos_paths < 1) fail("nlos_paths must be >= 1");
  if (!(pl_exp_los > 0.0)) fail("pl_exp_los must be > 0");
  if (!(pl_exp_nlos > pl_exp_los)) fail("pl_exp_nlos must exceed pl_exp_los");
  if (!(bandwidth_hz > 0.0)) fail("bandwidth_hz must be > 0");
  if (!(cell_radius_m > 0.0)) fail("cell_radius_m must be > 0");
  if (!(penalty_factor > 0.0)) fail("penalty_factor must be > 0");
  if (!(kkt_tol > 0.0) || !(conv_tol > 0.0)) fail("tolerances must be > 0");
  if (!(step_a > 0.0) || !(step_b > 0.0)) fail("step_size_params must be > 0");
  if (min_rate_bps < 0.0) fail("min_rate_bps must be >= 0");
  if (site_candidates < 1) fail("site_candidates must be >= 1");
  if (max_outer_iters < 1 || max_assoc_iters < 1 || max_sa_iters < 1 || max_pa_iters < 1)
    fail("iteration limits must be >= 1");
}

void apply_case(ScenarioConfig& cfg, int case_id) {
  if (case_id == 1) {
    cfg.num_sbs = 4;
  } else if (case_id == 2) {
    cfg.num_sbs = 8;
  } else {
    throw std::invalid_argument("config: case must be 1 or 2");
  }
}

void apply_desk_scale(ScenarioConfig& cfg) {
  cfg.num_ues = 10;
  cfg.num_subchannels = 16;
}

void apply_paper_scale(ScenarioConfig& cfg) {
  cfg.num_ues = 30;
  cfg.num_subchannels = 50;
}

namespace {

using nlohmann::json;

json to_json(const ScenarioConfig& c) {
  return json{{"num_sbs", c.num_sbs},
              {"num_ues", c.num_ues},
              {"num_subchannels", c.num_subchannels},
              {"mbs_antennas", c.mbs_antennas},
              {"sbs_antennas", c.sbs_antennas},
              {"ue_antennas", c.ue_antennas},
              {"nlos_paths", c.nlos_paths},
              {"max_power_mbs_dbm", c.max_power_mbs_dbm},
              {"max_power_sbs_dbm", c.max_power_sbs_dbm},
              {"bandwidth_hz", c.bandwidth_hz},
              {"noise_density_dbm_hz", c.noise_density_dbm_hz},
              {"carrier_freq_hz", c.carrier_freq_hz},
              {"cell_radius_m", c.cell_radius_m},
              {"pl_exp_los", c.pl_exp_los},
              {"pl_exp_nlos", c.pl_exp_nlos},
              {"shadow_std_los_db", c.shadow_std_los_db},
              {"shadow_std_nlos_db", c.shadow_std_nlos_db},
              {"min_rate_bps", c.min_rate_bps},
              {"penalty_factor", c.penalty_factor},
              {"step_a", c.step_a},
              {"step_b", c.step_b},
              {"max_outer_iters", c.max_outer_iters},
              {"max_assoc_iters", c.max_assoc_iters},
              {"max_sa_iters", c.max_sa_iters},
              {"max_pa_iters", c.max_pa_iters},
              {"kkt_tol", c.kkt_tol},
              {"conv_tol", c.conv_tol},
              {"rng_seed", c.rng_seed},
              {"site_candidates", c.site_candidates}};
}

// unknown keys are rejected; absent keys keep their defaults
void from_json(const json& j, ScenarioConfig& c) {
  const json defaults = to_json(c);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!defaults.contains(it.key()))
      throw std::invalid_argument("config: unknown key '" + it.key() + "'");
  }
  auto get = [&](const char* k, auto& field) {
    if (j.contains(k)) j.at(k).get_to(field);
  };
  get("num_sbs", c.num_sbs);
  get("num_ues", c.num_ues);
  get("num_subchannels", c.num_subchannels);
  get("mbs_antennas", c.mbs_antennas);
  get("sbs_antennas", c.sbs_antennas);
  get("ue_antennas", c.ue_antennas);
  get("nlos_paths", c.nlos_paths);
  get("max_power_mbs_dbm", c.max_power_mbs_dbm);
  get("max_power_sbs_dbm", c.max_power_sbs_dbm);
  get("bandwidth_hz", c.bandwidth_hz);
  get("noise_density_dbm_hz", c.noise_density_dbm_hz);
  get("carrier_freq_hz", c.carrier_freq_hz);
  get("cell_radius_m", c.cell_radius_m);
  get("pl_exp_los", c.pl_exp_los);
  get("pl_exp_nlos", c.pl_exp_nlos);
  get("shadow_std_los_db", c.shadow_std_los_db);
  get("shadow_std_nlos_db", c.shadow_std_nlos_db);
  get("min_rate_bps", c.min_rate_bps);
  get("penalty_factor", c.penalty_factor);
  get("step_a", c.step_a);
  get("step_b", c.step_b);
  get("max_outer_iters", c.max_outer_iters);
  get("max_assoc_iters", c.max_assoc_iters);
  get("max_sa_iters", c.max_sa_iters);
  get("max_pa_iters", c.max_pa_iters);
  get("kkt_tol", c.kkt_tol);
  get("conv_tol", c.conv_tol);
  get("rng_seed", c.rng_seed);
  get("site_candidates", c.site_candidates);
}

}  // namespace

std::string config_to_json(const ScenarioConfig& cfg) { return to_json(cfg).dump(2); }

ScenarioConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  ScenarioConfig cfg;
  from_json(j, cfg);
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

void save_config(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("config: cannot write " + path);
  out << config_to_json(cfg) << "\n";
}

}  // namespace iab
