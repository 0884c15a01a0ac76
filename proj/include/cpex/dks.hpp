#ifndef CPEX_DKS_HPP_
#define CPEX_DKS_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>

#include "cpex/super_arm.hpp"

namespace cpex {

// Symmetric nonnegative edge weights on the complete graph over [n];
// no self-loops (the diagonal stays zero).
struct WeightedGraph {
  int n = 0;
  Eigen::MatrixXd weights;  // n x n, symmetric, zero diagonal

  double weight(int i, int j) const { return weights(i, j); }

  // total edge weight of the subgraph induced by S
  double induced_weight(const SuperArm& S) const {
    double w = 0.0;
    const auto& idx = S.indices();
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b) w += weights(idx[a], idx[b]);
    return w;
  }
};

struct ReductionGraph {
  WeightedGraph graph;
  int clamped = 0;  // negative entries zeroed (only possible for non-PD input)
};

// w~_ij = w_ij + w_ii + w_jj over the complete graph
ReductionGraph build_reduction_graph(const Eigen::MatrixXd& W);

// Remove a minimum weighted-degree vertex until k remain. Degree ties peel
// the largest index, so smaller indices survive.
SuperArm greedy_peeling(const WeightedGraph& g, int k);

using DksOracle = std::function<SuperArm(const WeightedGraph&, int)>;

inline DksOracle greedy_peeling_oracle() {
  return [](const WeightedGraph& g, int k) { return greedy_peeling(g, k); };
}

struct QpSolution {
  SuperArm subset;
  double qp_value = 0.0;                   // chi^T W chi
  std::optional<double> certificate;       // alpha_QP from the spectral bound
};

double quadratic_value(const Eigen::MatrixXd& W, const SuperArm& S);

// Approximate max of chi^T W chi over size-k supports for positive definite
// W, via the graph reduction and a DkS oracle. The certificate is
// alpha_QP = (1/(k-1)) * (lambda_min/lambda_max) * alpha_dks, with the
// eigenvalue estimates widened by their residual. Pass
// want_certificate=false to skip the eigenvalue work (and the PD check).
QpSolution quadratic_maximize(const Eigen::MatrixXd& W, int k, const DksOracle& oracle,
                              double alpha_dks = 1.0, bool want_certificate = true);

// Exact maximizer by enumeration; throws if C(n,k) exceeds the budget.
QpSolution brute_force_qp(const Eigen::MatrixXd& W, int k, std::uint64_t budget = 1000000);

}  // namespace cpex

#endif  // CPEX_DKS_HPP_
