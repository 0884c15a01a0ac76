#ifndef CPEX_ALLOCATION_HPP_
#define CPEX_ALLOCATION_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cpex/decision_class.hpp"
#include "cpex/super_arm.hpp"

namespace cpex {

// A static sampling design: explicit support with strictly positive
// probabilities summing to one. The support must span R^n, otherwise the
// least-squares estimator never identifies theta.
struct Allocation {
  std::vector<SuperArm> support;
  Eigen::VectorXd probs;

  // Lambda_p = sum p_M chi chi^T
  Eigen::MatrixXd lambda() const;
};

// rank of the stacked indicator vectors == n
bool spans_ambient(const std::vector<SuperArm>& support);

Allocation uniform_allocation(const std::vector<SuperArm>& support);

struct CyclicDesign {
  std::vector<SuperArm> blocks;
  bool gram_singular = false;  // the n base blocks alone do not span
  int augmented = 0;           // swap-perturbed blocks appended to restore rank
};

// n cyclic shifts of a contiguous block of k ones; the Gram matrix of the
// base blocks is circulant with eigenvalues k + cos(2 pi j / n) k (k-1),
// which can vanish, in which case perturbed blocks are appended.
CyclicDesign cyclic_design(int n, int k);

// Frank-Wolfe minimization of max_M ||chi_M||^2_{Lambda_p^{-1}} over the
// simplex restricted to the candidate support. Entries below prune_threshold
// are removed and the rest renormalized.
Allocation g_allocation(const DecisionClass& dc, const std::vector<SuperArm>& candidates,
                        int iterations = 500, double prune_threshold = 1e-6);

// cyclic blocks plus random feasible super-arms up to 3n candidates
std::vector<SuperArm> default_candidate_support(const DecisionClass& dc, std::uint64_t seed);

// Efficient design apportionment: start from t_i = ceil((t - s/2) p_i) and
// adjust until the counts sum to t exactly.
std::vector<long> round_allocation(const Allocation& p, long t);

// tracking rule: argmin T_M / p_M over the support, ties by support order
int next_pull(const Allocation& p, const std::vector<long>& counts);

struct ComplexityReport {
  double rho = 0.0;
  double rho_prime = 0.0;
  double h_eps = 0.0;
  double h_eps_prime = 0.0;
  bool rho_is_lower_bound = false;  // max taken over a sampled subset only
};

ComplexityReport complexity_report(const Allocation& p, const Eigen::VectorXd& theta,
                                   const DecisionClass& dc, double eps,
                                   std::uint64_t enumeration_budget = 1000000);

}  // namespace cpex

#endif  // CPEX_ALLOCATION_HPP_
