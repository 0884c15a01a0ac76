#ifndef CPEX_DECISION_CLASS_HPP_
#define CPEX_DECISION_CLASS_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "cpex/super_arm.hpp"

namespace cpex {

// The feasible set of super-arms: either all size-k subsets of [n] (Top-k)
// or the bases of a matroid given through an independence oracle.
class DecisionClass {
 public:
  using IndependenceOracle = std::function<bool(const std::vector<int>&)>;

  static DecisionClass top_k(int n, int k);
  static DecisionClass matroid(int n, IndependenceOracle oracle);

  int arm_count() const { return n_; }
  // Super-arm size: k for Top-k, the matroid rank otherwise.
  int super_arm_size() const { return k_; }
  bool is_top_k() const { return !oracle_; }
  // log K; exact log C(n,k) for Top-k, the upper bound k*log(n) for matroids
  // whose base count is not enumerated.
  double log_cardinality() const { return log_cardinality_; }

  bool is_member(const SuperArm& arm) const;
  bool independent(const std::vector<int>& subset) const;

  // All feasible super-arms, or nullopt when the count exceeds `budget`.
  std::optional<std::vector<SuperArm>> enumerate(std::uint64_t budget = 1000000) const;

 private:
  DecisionClass() = default;
  int n_ = 0;
  int k_ = 0;
  double log_cardinality_ = 0.0;
  IndependenceOracle oracle_;  // empty for Top-k
};

// exact log of the binomial coefficient
double log_binomial(int n, int k);
// C(n,k), saturating to cap+1 once it exceeds `cap`
std::uint64_t binomial_capped(int n, int k, std::uint64_t cap);

// argmax of sum_{e in M} theta(e) over the decision class; lexicographic
// tie-break on the sorted index list.
SuperArm best_super_arm(const Eigen::VectorXd& theta, const DecisionClass& dc);

// Maximizer of modular weights over the class, optionally excluding one
// super-arm. Exclusion is resolved by the best single exchange, which is
// exact because the second-best basis differs in one element.
std::pair<SuperArm, double> linear_maximize(const Eigen::VectorXd& weights,
                                            const DecisionClass& dc,
                                            const SuperArm* exclude = nullptr);

struct GapReport {
  SuperArm best;
  double delta_min = 0.0;
};

GapReport gap_report(const Eigen::VectorXd& theta, const DecisionClass& dc);

inline double super_arm_value(const Eigen::VectorXd& theta, const SuperArm& arm) {
  double v = 0.0;
  for (int e : arm.indices()) v += theta(e);
  return v;
}

}  // namespace cpex

#endif  // CPEX_DECISION_CLASS_HPP_
