#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "iab/config.hpp"
#include "iab/rng.hpp"
#include "iab/topology.hpp"

namespace iab {

enum class LinkKind { backhaul, mbs_ue, sbs_ue };

LinkKind link_kind(int b, int i, int num_sbs);

// close-in reference-distance path loss in dB at 1 m anchor
double path_loss_db(double beta, double d_m, double f_c_hz, double shadow_db);

double los_probability(LinkKind kind, double d_m);

// ULA response, unit norm; spacing in wavelengths
Eigen::VectorXcd array_response(int n, double angle_rad, double spacing_wl = 0.5);

struct LinkState {
  int tx = -1, rx = -1;
  bool los = false;                     // blockage state after site-candidate OR
  double pl_los_db = 0.0, pl_nlos_db = 0.0;  // shadowing included
  double shadow_los_db = 0.0, shadow_nlos_db = 0.0;
  double aod_los = 0.0, aoa_los = 0.0;
  std::vector<double> aod_nlos, aoa_nlos;         // one per scattered path
  std::vector<Eigen::MatrixXcd> H;                // per subchannel, N_r x N_t
};

// All ordered (tx BS, rx node) links of one network realization.
struct ChannelSet {
  int B = 0, K = 0, M = 0;
  std::vector<LinkState> links;  // index pair_index(b, i)

  int num_nodes() const { return B + K + 1; }
  int num_pairs() const { return (B + 1) * (B + K); }
  // valid for b in [0,B], i in [1,B+K], b != i
  int pair_index(int b, int i) const { return b * (B + K) + (i - 1); }
  const LinkState& link(int b, int i) const { return links[pair_index(b, i)]; }
};

// Combines a gated LoS rank-1 term and an L-path scattered sum, each weighted
// by the inverse square root of its linear path loss.
Eigen::MatrixXcd compose_channel(bool los, double pl_los_db, double pl_nlos_db,
                                 std::complex<double> los_gain,
                                 const std::vector<std::complex<double>>& nlos_gains,
                                 double aod_los, double aoa_los,
                                 const std::vector<double>& aod_nlos,
                                 const std::vector<double>& aoa_nlos, int n_tx, int n_rx);

ChannelSet realize_channels(const Topology& topo, const ScenarioConfig& cfg,
                            std::uint64_t trial_index = 0);

// Beamforming gains. direct(b,i,m) is the matched-filter gain of link (b,i);
// cross(b,i,b',i',m) couples interferer (b',i')'s transmit beam into victim
// (b,i)'s receive beam. Cross gains are tabulated when small enough, else
// computed on demand from the retained channel set.
class GainTable {
 public:
  GainTable() = default;
  GainTable(std::shared_ptr<const ChannelSet> ch, double dense_budget = 8e6);

  int num_sbs() const { return ch_->B; }
  int num_ues() const { return ch_->K; }
  int num_subchannels() const { return ch_->M; }
  int num_nodes() const { return ch_->num_nodes(); }

  double direct(int b, int i, int m) const;
  double cross(int b, int i, int bp, int ip, int m) const;
  const Eigen::VectorXcd& tx_beam(int b, int i, int m) const;
  const Eigen::VectorXcd& rx_beam(int b, int i, int m) const;
  bool los(int b, int i) const { return ch_->link(b, i).los; }
  const ChannelSet& channels() const { return *ch_; }

 private:
  std::shared_ptr<const ChannelSet> ch_;
  std::vector<double> direct_;                 // (pair, m)
  std::vector<Eigen::VectorXcd> v_, w_;        // (pair, m)
  std::vector<double> cross_;                  // (victim pair, interferer pair, m); empty if lazy
  int M_ = 0, P_ = 0;

  double compute_cross(int b, int i, int bp, int ip, int m) const;
};

GainTable beamform_and_gain(std::shared_ptr<const ChannelSet> ch);

}  // namespace iab
