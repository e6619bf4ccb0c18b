#include "iab/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace iab {

LinkKind link_kind(int b, int i, int num_sbs) {
  if (i <= num_sbs) return LinkKind::backhaul;
  return b == 0 ? LinkKind::mbs_ue : LinkKind::sbs_ue;
}

double path_loss_db(double beta, double d_m, double f_c_hz, double shadow_db) {
  if (d_m < 1.0) throw std::invalid_argument("path_loss: distance below 1 m reference");
  const double a = 20.0 * std::log10(4.0 * M_PI * f_c_hz / kSpeedOfLight);
  return a + 10.0 * beta * std::log10(d_m) + shadow_db;
}

double los_probability(LinkKind kind, double d_m) {
  if (!(d_m > 0.0)) throw std::invalid_argument("los_probability: d must be > 0");
  switch (kind) {
    case LinkKind::backhaul: {
      const double e = std::exp(-d_m / 72.0);
      return std::min(18.0 / d_m, 1.0) * (1.0 - e) + e;
    }
    case LinkKind::mbs_ue: {
      const double e = std::exp(-d_m / 63.0);
      return std::min(18.0 / d_m, 1.0) * (1.0 - e) + e;
    }
    case LinkKind::sbs_ue:
      return 0.5 - std::min(0.5, 5.0 * std::exp(-156.0 / d_m)) +
             std::min(0.5, 5.0 * std::exp(-d_m / 30.0));
  }
  return 0.0;
}

Eigen::VectorXcd array_response(int n, double angle_rad, double spacing_wl) {
  Eigen::VectorXcd a(n);
  const double phase = 2.0 * M_PI * spacing_wl * std::sin(angle_rad);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) a(k) = std::polar(norm, phase * k);
  return a;
}

Eigen::MatrixXcd compose_channel(bool los, double pl_los_db, double pl_nlos_db,
                                 std::complex<double> los_gain,
                                 const std::vector<std::complex<double>>& nlos_gains,
                                 double aod_los, double aoa_los,
                                 const std::vector<double>& aod_nlos,
                                 const std::vector<double>& aoa_nlos, int n_tx, int n_rx) {
  const int L = static_cast<int>(nlos_gains.size());
  const double scale = std::sqrt(static_cast<double>(n_tx) * n_rx);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n_rx, n_tx);
  if (los) {
    const double w = 1.0 / std::sqrt(db_to_linear(pl_los_db));
    H += (w * scale * los_gain) * array_response(n_rx, aoa_los) *
         array_response(n_tx, aod_los).adjoint();
  }
  const double wn = 1.0 / std::sqrt(db_to_linear(pl_nlos_db));
  const double path_scale = scale / std::sqrt(static_cast<double>(L));
  for (int l = 0; l < L; ++l) {
    H += (wn * path_scale * nlos_gains[l]) * array_response(n_rx, aoa_nlos[l]) *
         array_response(n_tx, aod_nlos[l]).adjoint();
  }
  return H;
}

ChannelSet realize_channels(const Topology& topo, const ScenarioConfig& cfg,
                            std::uint64_t trial_index) {
  ChannelSet ch;
  ch.B = topo.num_sbs();
  ch.K = topo.num_ues();
  ch.M = cfg.num_subchannels;
  ch.links.resize(ch.num_pairs());

  const int L = cfg.nlos_paths;
  for (int b = 0; b <= ch.B; ++b) {
    for (int i = 1; i < ch.num_nodes(); ++i) {
      if (i == b) continue;
      LinkState& st = ch.links[ch.pair_index(b, i)];
      st.tx = b;
      st.rx = i;
      // one substream per (trial, link): generation order never matters
      RngStream rng(cfg.rng_seed, stream::kChannel,
                    trial_index * 1000003ULL + static_cast<std::uint64_t>(ch.pair_index(b, i)));

      const double d = std::max(distance(topo, b, i), 1.0);
      const LinkKind kind = link_kind(b, i, ch.B);
      const double p_los = los_probability(kind, d);
      // backhaul links pick the best of several candidate sites: LoS if any
      // candidate is unblocked
      const int draws = kind == LinkKind::backhaul ? cfg.site_candidates : 1;
      st.los = false;
      for (int s = 0; s < draws; ++s) st.los = st.los || rng.bernoulli(p_los);

      st.shadow_los_db = rng.normal(0.0, cfg.shadow_std_los_db);
      st.shadow_nlos_db = rng.normal(0.0, cfg.shadow_std_nlos_db);
      st.pl_los_db = path_loss_db(cfg.pl_exp_los, d, cfg.carrier_freq_hz, st.shadow_los_db);
      st.pl_nlos_db = path_loss_db(cfg.pl_exp_nlos, d, cfg.carrier_freq_hz, st.shadow_nlos_db);

      st.aod_los = rng.uniform(-M_PI / 2, M_PI / 2);
      st.aoa_los = rng.uniform(-M_PI / 2, M_PI / 2);
      st.aod_nlos.resize(L);
      st.aoa_nlos.resize(L);
      for (int l = 0; l < L; ++l) {
        st.aod_nlos[l] = rng.uniform(-M_PI / 2, M_PI / 2);
        st.aoa_nlos[l] = rng.uniform(-M_PI / 2, M_PI / 2);
      }

      const int n_tx = b == 0 ? cfg.mbs_antennas : cfg.sbs_antennas;
      const int n_rx = i <= ch.B ? cfg.sbs_antennas : cfg.ue_antennas;
      st.H.resize(ch.M);
      std::vector<std::complex<double>> nlos_gains(L);
      for (int m = 0; m < ch.M; ++m) {
        const std::complex<double> los_gain = rng.cnormal();
        for (int l = 0; l < L; ++l) nlos_gains[l] = rng.cnormal();
        st.H[m] = compose_channel(st.los, st.pl_los_db, st.pl_nlos_db, los_gain, nlos_gains,
                                  st.aod_los, st.aoa_los, st.aod_nlos, st.aoa_nlos, n_tx, n_rx);
      }
    }
  }
  return ch;
}

namespace {

// dominant singular triple via the small-side Gram matrix
void dominant_svd(const Eigen::MatrixXcd& H, Eigen::VectorXcd& w, Eigen::VectorXcd& v,
                  double& gain) {
  const double fro2 = H.squaredNorm();
  if (fro2 < 1e-300) {
    w = Eigen::VectorXcd::Zero(H.rows());
    v = Eigen::VectorXcd::Zero(H.cols());
    w(0) = 1.0;
    v(0) = 1.0;
    gain = 0.0;
    return;
  }
  if (H.rows() <= H.cols()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H * H.adjoint());
    const int top = static_cast<int>(es.eigenvalues().size()) - 1;
    gain = std::max(0.0, es.eigenvalues()(top));
    w = es.eigenvectors().col(top);
    v = H.adjoint() * w;
    const double n = v.norm();
    if (n > 0) v /= n;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.adjoint() * H);
    const int top = static_cast<int>(es.eigenvalues().size()) - 1;
    gain = std::max(0.0, es.eigenvalues()(top));
    v = es.eigenvectors().col(top);
    w = H * v;
    const double n = w.norm();
    if (n > 0) w /= n;
  }
}

}  // namespace

GainTable::GainTable(std::shared_ptr<const ChannelSet> ch, double dense_budget)
    : ch_(std::move(ch)) {
  M_ = ch_->M;
  P_ = ch_->num_pairs();
  direct_.assign(static_cast<size_t>(P_) * M_, 0.0);
  v_.resize(static_cast<size_t>(P_) * M_);
  w_.resize(static_cast<size_t>(P_) * M_);
  for (int b = 0; b <= ch_->B; ++b) {
    for (int i = 1; i < ch_->num_nodes(); ++i) {
      if (i == b) continue;
      const int p = ch_->pair_index(b, i);
      const LinkState& st = ch_->links[p];
      for (int m = 0; m < M_; ++m) {
        double g;
        dominant_svd(st.H[m], w_[static_cast<size_t>(p) * M_ + m],
                     v_[static_cast<size_t>(p) * M_ + m], g);
        direct_[static_cast<size_t>(p) * M_ + m] = g;
      }
    }
  }
  const double dense_size = static_cast<double>(P_) * P_ * M_;
  if (dense_size <= dense_budget) {
    cross_.assign(static_cast<size_t>(P_) * P_ * M_, 0.0);
    for (int b = 0; b <= ch_->B; ++b)
      for (int i = 1; i < ch_->num_nodes(); ++i) {
        if (i == b) continue;
        const int pv = ch_->pair_index(b, i);
        for (int bp = 0; bp <= ch_->B; ++bp)
          for (int ip = 1; ip < ch_->num_nodes(); ++ip) {
            if (ip == bp || bp == i) continue;
            const int pi = ch_->pair_index(bp, ip);
            for (int m = 0; m < M_; ++m)
              cross_[(static_cast<size_t>(pv) * P_ + pi) * M_ + m] =
                  compute_cross(b, i, bp, ip, m);
          }
      }
  }
}

double GainTable::direct(int b, int i, int m) const {
  return direct_[static_cast<size_t>(ch_->pair_index(b, i)) * M_ + m];
}

const Eigen::VectorXcd& GainTable::tx_beam(int b, int i, int m) const {
  return v_[static_cast<size_t>(ch_->pair_index(b, i)) * M_ + m];
}

const Eigen::VectorXcd& GainTable::rx_beam(int b, int i, int m) const {
  return w_[static_cast<size_t>(ch_->pair_index(b, i)) * M_ + m];
}

double GainTable::compute_cross(int b, int i, int bp, int ip, int m) const {
  if (bp == i) return 0.0;  // self-interference is excluded by the duplexing rules
  // interferer (bp -> ip) beam arriving at victim link (b -> i)'s receiver
  const Eigen::MatrixXcd& H = ch_->link(bp, i).H[m];
  const std::complex<double> c = rx_beam(b, i, m).adjoint() * (H * tx_beam(bp, ip, m));
  return std::norm(c);
}

double GainTable::cross(int b, int i, int bp, int ip, int m) const {
  if (!cross_.empty()) {
    const int pv = ch_->pair_index(b, i), pi = ch_->pair_index(bp, ip);
    return cross_[(static_cast<size_t>(pv) * P_ + pi) * M_ + m];
  }
  return compute_cross(b, i, bp, ip, m);
}

GainTable beamform_and_gain(std::shared_ptr<const ChannelSet> ch) {
  return GainTable(std::move(ch));
}

}  // namespace iab
