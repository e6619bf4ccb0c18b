#pragma once

#include <cstdint>
#include <string>

#include "iab/units.hpp"

namespace iab {

// Scenario parameters. Defaults are the evaluation setup for the dense-urban
// two-tier network: 28 GHz carrier, 2 MHz subchannels, close-in path loss.
struct ScenarioConfig {
  int num_sbs = 4;
  int num_ues = 30;
  int num_subchannels = 50;
  int mbs_antennas = 64;
  int sbs_antennas = 16;
  int ue_antennas = 2;
  int nlos_paths = 6;
  double max_power_mbs_dbm = 46.0;
  double max_power_sbs_dbm = 30.0;
  double bandwidth_hz = 2e6;  // per subchannel
  double noise_density_dbm_hz = -174.0;
  double carrier_freq_hz = 28e9;
  double cell_radius_m = 350.0;
  double pl_exp_los = 2.1;
  double pl_exp_nlos = 3.17;
  double shadow_std_los_db = 3.76;
  double shadow_std_nlos_db = 8.09;
  double min_rate_bps = 2e6;  // per-UE QoS target

  // binary-relaxation penalty, as a multiple of bandwidth*log2(1+peak SNR)
  double penalty_factor = 10.0;
  // diminishing step size a/(b+t) for the dual updates
  double step_a = 1.0;
  double step_b = 10.0;

  int max_outer_iters = 10;
  int max_assoc_iters = 200;
  int max_sa_iters = 12;
  int max_pa_iters = 12;
  double kkt_tol = 1e-6;
  double conv_tol = 1e-3;

  std::uint64_t rng_seed = 1;
  // independent blockage draws per backhaul link (site planning gain); 1 disables
  int site_candidates = 3;

  double noise_power_w() const { return noise_power_watt(noise_density_dbm_hz, bandwidth_hz); }
  double max_power_w(int b) const {
    return dbm_to_watt(b == 0 ? max_power_mbs_dbm : max_power_sbs_dbm);
  }

  // throws std::invalid_argument on out-of-range values
  void validate() const;
};

// geometry presets: case 1 has 4 SBSs, case 2 has 8
void apply_case(ScenarioConfig& cfg, int case_id);
// small instance sizes for fast simulation campaigns
void apply_desk_scale(ScenarioConfig& cfg);
// full-size instance sizes (slow under Monte-Carlo)
void apply_paper_scale(ScenarioConfig& cfg);

ScenarioConfig load_config(const std::string& path);
void save_config(const ScenarioConfig& cfg, const std::string& path);
std::string config_to_json(const ScenarioConfig& cfg);
ScenarioConfig config_from_json(const std::string& text);

}  // namespace iab
