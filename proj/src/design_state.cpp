#include "cpex/design_state.hpp"

#include <cmath>
#include <stdexcept>

namespace cpex {

DesignState::DesignState(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("DesignState: dimension must be positive");
  A_ = Eigen::MatrixXd::Zero(n, n);
  A_inv_ = Eigen::MatrixXd::Zero(n, n);
  b_ = Eigen::VectorXd::Zero(n);
  theta_hat_ = Eigen::VectorXd::Zero(n);
}

void DesignState::try_direct_inverse() {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A_);
  if (es.eigenvalues().minCoeff() > kPivotThreshold) {
    A_inv_ = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
             es.eigenvectors().transpose();
    invertible_ = true;
    updates_since_refresh_ = 0;
  }
}

void DesignState::update(const SuperArm& arm, double reward) {
  if (arm.ambient() != n_)
    throw std::invalid_argument("DesignState::update: arm dimension mismatch");
  if (!std::isfinite(reward))
    throw std::invalid_argument("DesignState::update: non-finite reward");

  const Eigen::VectorXd chi = arm.indicator();
  A_.noalias() += chi * chi.transpose();
  b_ += reward * chi;
  ++pull_counts_[arm];
  ++t_;

  if (invertible_) {
    if (++updates_since_refresh_ >= kRefreshPeriod) {
      try_direct_inverse();
    } else {
      // Sherman-Morrison: (A + cc^T)^{-1} = A^{-1} - (A^{-1}c)(c^T A^{-1})/(1 + c^T A^{-1} c)
      Eigen::VectorXd u = A_inv_ * chi;
      A_inv_.noalias() -= u * u.transpose() / (1.0 + chi.dot(u));
    }
  } else {
    try_direct_inverse();
  }
  if (invertible_) theta_hat_.noalias() = A_inv_ * b_;
}

const Eigen::MatrixXd& DesignState::inverse() const {
  if (!invertible_) throw std::runtime_error("DesignState: A is rank deficient, no inverse");
  return A_inv_;
}

const Eigen::VectorXd& DesignState::theta_hat() const {
  if (!invertible_) throw std::runtime_error("DesignState: theta_hat undefined before full rank");
  return theta_hat_;
}

long DesignState::pull_count(const SuperArm& arm) const {
  auto it = pull_counts_.find(arm);
  return it == pull_counts_.end() ? 0 : it->second;
}

double DesignState::ellipsoid_norm(const Eigen::VectorXd& x) const {
  if (!invertible_)
    throw std::runtime_error("DesignState::ellipsoid_norm: design matrix is rank deficient");
  if (x.size() != n_)
    throw std::invalid_argument("DesignState::ellipsoid_norm: dimension mismatch");
  double q = x.dot(A_inv_ * x);
  return std::sqrt(std::max(q, 0.0));
}

}  // namespace cpex
