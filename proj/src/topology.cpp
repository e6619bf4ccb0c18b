#include "iab/topology.hpp"

#include <cmath>
#include <stdexcept>

#include "iab/rng.hpp"

namespace iab {

const Eigen::Vector2d& Topology::position(int id) const {
  if (id == 0) return mbs;
  if (is_bs(id)) return sbs[id - 1];
  if (is_ue(id)) return ue[id - num_bs()];
  throw std::out_of_range("topology: bad node id " + std::to_string(id));
}

Topology deploy(const ScenarioConfig& cfg, DeployMode mode, std::uint64_t trial_index) {
  cfg.validate();
  const int B = cfg.num_sbs, K = cfg.num_ues;
  const double R = cfg.cell_radius_m;

  Topology topo;
  topo.cell_radius_m = R;
  topo.sbs.reserve(B);
  const double ring = 0.6 * R;
  for (int b = 0; b < B; ++b) {
    const double ang = 2.0 * M_PI * b / B;
    topo.sbs.emplace_back(ring * std::cos(ang), ring * std::sin(ang));
  }

  topo.ue.reserve(K);
  if (mode == DeployMode::fixed) {
    const double r_ue = 0.8 * R;
    for (int k = 0; k < K; ++k) {
      const double ang = 2.0 * M_PI * k / K + M_PI / K;
      topo.ue.emplace_back(r_ue * std::cos(ang), r_ue * std::sin(ang));
    }
  } else {
    RngStream rng(cfg.rng_seed, stream::kTopology, trial_index);
    const double min_sep = 1.0;
    for (int k = 0; k < K; ++k) {
      Eigen::Vector2d p;
      for (int tries = 0; tries < 10000; ++tries) {
        const double r = R * std::sqrt(rng.uniform());
        const double ang = 2.0 * M_PI * rng.uniform();
        p = {r * std::cos(ang), r * std::sin(ang)};
        bool clear = p.norm() >= min_sep;
        for (const auto& s : topo.sbs) clear = clear && (p - s).norm() >= min_sep;
        if (clear) break;
      }
      topo.ue.push_back(p);
    }
  }
  if (topo.num_sbs() != B || topo.num_ues() != K)
    throw std::logic_error("topology: deployment count mismatch");
  return topo;
}

double distance(const Topology& topo, int b, int i) {
  if (b == i) throw std::invalid_argument("topology: distance of a node to itself");
  if (!topo.is_bs(b)) throw std::invalid_argument("topology: tx must be a BS id");
  if (i <= 0 || i >= topo.num_nodes()) throw std::invalid_argument("topology: bad rx id");
  return (topo.position(b) - topo.position(i)).norm();
}

}  // namespace iab
