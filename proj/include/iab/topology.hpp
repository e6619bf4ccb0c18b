#pragma once

#include <vector>

#include <Eigen/Core>

#include "iab/config.hpp"

namespace iab {

// Node ids: 0 = MBS, 1..B = SBSs, B+1..B+K = UEs.
struct Topology {
  double cell_radius_m = 0.0;
  Eigen::Vector2d mbs = Eigen::Vector2d::Zero();
  std::vector<Eigen::Vector2d> sbs;
  std::vector<Eigen::Vector2d> ue;

  int num_sbs() const { return static_cast<int>(sbs.size()); }
  int num_ues() const { return static_cast<int>(ue.size()); }
  int num_bs() const { return num_sbs() + 1; }
  int num_nodes() const { return num_bs() + num_ues(); }
  bool is_bs(int id) const { return id >= 0 && id <= num_sbs(); }
  bool is_ue(int id) const { return id > num_sbs() && id < num_nodes(); }

  const Eigen::Vector2d& position(int id) const;
};

enum class DeployMode { fixed, random };

// SBSs sit on a ring at 0.6*radius in both modes; `random` draws UE positions
// uniformly in the disk (at least 1 m from any BS), `fixed` puts them on an
// outer ring for reproducible hand-checked layouts. trial_index selects the
// per-trial substream of rng_seed.
Topology deploy(const ScenarioConfig& cfg, DeployMode mode, std::uint64_t trial_index = 0);

double distance(const Topology& topo, int b, int i);

}  // namespace iab
