#ifndef CPEX_SUPER_ARM_HPP_
#define CPEX_SUPER_ARM_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpex {

// A size-k subset of the n base arms, kept as a strictly increasing index
// list. The 0/1 indicator view is what enters all linear algebra.
class SuperArm {
 public:
  SuperArm() : n_(0) {}

  SuperArm(std::vector<int> indices, int n) : indices_(std::move(indices)), n_(n) {
    std::sort(indices_.begin(), indices_.end());
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      if (indices_[i] < 0 || indices_[i] >= n_)
        throw std::invalid_argument("SuperArm: index " + std::to_string(indices_[i]) +
                                    " out of range [0," + std::to_string(n_) + ")");
      if (i > 0 && indices_[i] == indices_[i - 1])
        throw std::invalid_argument("SuperArm: duplicate index " + std::to_string(indices_[i]));
    }
  }

  const std::vector<int>& indices() const { return indices_; }
  int ambient() const { return n_; }
  int size() const { return static_cast<int>(indices_.size()); }

  bool contains(int e) const {
    return std::binary_search(indices_.begin(), indices_.end(), e);
  }

  Eigen::VectorXd indicator() const {
    Eigen::VectorXd chi = Eigen::VectorXd::Zero(n_);
    for (int e : indices_) chi(e) = 1.0;
    return chi;
  }

  friend bool operator==(const SuperArm& a, const SuperArm& b) {
    return a.n_ == b.n_ && a.indices_ == b.indices_;
  }
  friend bool operator!=(const SuperArm& a, const SuperArm& b) { return !(a == b); }
  friend bool operator<(const SuperArm& a, const SuperArm& b) {
    return a.indices_ < b.indices_;
  }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(indices_[i]);
    }
    return s + "}";
  }

 private:
  std::vector<int> indices_;
  int n_;
};

}  // namespace cpex

#endif  // CPEX_SUPER_ARM_HPP_
