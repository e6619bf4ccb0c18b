#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "iab/channel.hpp"
#include "iab/config.hpp"

namespace iab {

// dense (b, i, m) array; b in [0,B], i in [0,N-1], m in [0,M-1]
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int d1, int d2, int d3, double fill = 0.0)
      : d1_(d1), d2_(d2), d3_(d3), v_(static_cast<size_t>(d1) * d2 * d3, fill) {}

  double& operator()(int a, int b, int c) { return v_[(static_cast<size_t>(a) * d2_ + b) * d3_ + c]; }
  double operator()(int a, int b, int c) const {
    return v_[(static_cast<size_t>(a) * d2_ + b) * d3_ + c];
  }
  int dim1() const { return d1_; }
  int dim2() const { return d2_; }
  int dim3() const { return d3_; }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  size_t size() const { return v_.size(); }

 private:
  int d1_ = 0, d2_ = 0, d3_ = 0;
  std::vector<double> v_;
};

// association y (rows: serving BS, cols: node id), allocation x, powers P (watts)
struct Solution {
  Eigen::MatrixXd y;  // (B+1) x N, column 0 unused
  Tensor3 x;          // (B+1) x N x M
  Eigen::MatrixXd P;  // (B+1) x M

  static Solution zeros(int B, int K, int M);
  int parent_of(int i) const;  // -1 if none assigned
};

struct ConstraintCheck {
  std::string name;
  bool pass = true;
  double worst_slack = 0.0;  // negative = violated
  std::string detail;
};

struct ConstraintReport {
  std::vector<ConstraintCheck> checks;
  bool feasible = true;
  std::vector<std::vector<int>> cycles;  // directed cycles in the association graph (reported only)

  const ConstraintCheck& check(const std::string& name) const;
};

double sinr(const GainTable& gains, const Tensor3& x, const Eigen::MatrixXd& P, int b, int i,
            int m, double noise_w);
double rate(double sinr_lin, double bandwidth_hz);
double link_rate(const GainTable& gains, const Tensor3& x, const Eigen::MatrixXd& P, int b, int i,
                 int m, const ScenarioConfig& cfg);
double sum_rate(const GainTable& gains, const Solution& sol, const ScenarioConfig& cfg);

ConstraintReport validate(const GainTable& gains, const Solution& sol, const ScenarioConfig& cfg,
                          double tol = 1e-6);

std::string solution_to_json(const Solution& sol);
std::string report_to_csv(const ConstraintReport& rep);

}  // namespace iab
