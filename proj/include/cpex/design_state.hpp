#ifndef CPEX_DESIGN_STATE_HPP_
#define CPEX_DESIGN_STATE_HPP_

#include <Eigen/Dense>
#include <map>

#include "cpex/super_arm.hpp"

namespace cpex {

// Running least-squares statistics for the pulled design:
//   A = sum chi chi^T,  b = sum chi * r,  theta_hat = A^{-1} b.
// The inverse is maintained by rank-1 updates once A reaches full rank,
// with a periodic direct re-inversion to arrest drift.
class DesignState {
 public:
  explicit DesignState(int n);

  void update(const SuperArm& arm, double reward);

  int dimension() const { return n_; }
  long rounds() const { return t_; }
  bool invertible() const { return invertible_; }

  const Eigen::MatrixXd& design() const { return A_; }
  const Eigen::MatrixXd& inverse() const;
  const Eigen::VectorXd& accumulated_rewards() const { return b_; }
  const Eigen::VectorXd& theta_hat() const;

  long pull_count(const SuperArm& arm) const;
  const std::map<SuperArm, long>& pull_counts() const { return pull_counts_; }

  // sqrt(x^T A^{-1} x); throws while A is rank deficient
  double ellipsoid_norm(const Eigen::VectorXd& x) const;

  static constexpr double kPivotThreshold = 1e-10;
  static constexpr long kRefreshPeriod = 1000;

 private:
  void try_direct_inverse();

  int n_;
  long t_ = 0;
  long updates_since_refresh_ = 0;
  bool invertible_ = false;
  Eigen::MatrixXd A_;
  Eigen::MatrixXd A_inv_;
  Eigen::VectorXd b_;
  Eigen::VectorXd theta_hat_;
  std::map<SuperArm, long> pull_counts_;
};

}  // namespace cpex

#endif  // CPEX_DESIGN_STATE_HPP_
