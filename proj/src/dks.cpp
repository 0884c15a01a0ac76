#include "cpex/dks.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

#include "cpex/decision_class.hpp"
#include "cpex/spectral.hpp"

namespace cpex {

ReductionGraph build_reduction_graph(const Eigen::MatrixXd& W) {
  if (W.rows() != W.cols()) throw std::invalid_argument("build_reduction_graph: matrix not square");
  const int n = static_cast<int>(W.rows());
  ReductionGraph out;
  out.graph.n = n;
  out.graph.weights = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double w = W(i, j) + W(i, i) + W(j, j);
      if (w < 0.0) {
        w = 0.0;
        ++out.clamped;
      }
      out.graph.weights(i, j) = out.graph.weights(j, i) = w;
    }
  }
  return out;
}

SuperArm greedy_peeling(const WeightedGraph& g, int k) {
  if (k < 1 || k > g.n) throw std::invalid_argument("greedy_peeling: k out of range");
  std::vector<bool> alive(g.n, true);
  Eigen::VectorXd degree = g.weights.rowwise().sum();
  for (int remaining = g.n; remaining > k; --remaining) {
    int victim = -1;
    double min_degree = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.n; ++i) {
      if (!alive[i]) continue;
      if (degree(i) <= min_degree) {  // ties: peel the largest index
        min_degree = degree(i);
        victim = i;
      }
    }
    alive[victim] = false;
    for (int i = 0; i < g.n; ++i)
      if (alive[i]) degree(i) -= g.weights(i, victim);
  }
  std::vector<int> kept;
  for (int i = 0; i < g.n; ++i)
    if (alive[i]) kept.push_back(i);
  return SuperArm(kept, g.n);
}

double quadratic_value(const Eigen::MatrixXd& W, const SuperArm& S) {
  double v = 0.0;
  const auto& idx = S.indices();
  for (int a : idx)
    for (int b : idx) v += W(a, b);
  return v;
}

QpSolution quadratic_maximize(const Eigen::MatrixXd& W, int k, const DksOracle& oracle,
                              double alpha_dks, bool want_certificate) {
  if (k < 2) throw std::invalid_argument("quadratic_maximize: requires k >= 2");
  QpSolution out;
  if (want_certificate) {
    SpectralSummary s = extreme_eigenvalues(W);
    // widen conservatively: stopping rules must never be early
    const double lo = s.lambda_min - s.residual;
    const double hi = s.lambda_max + s.residual;
    if (lo <= 0.0)
      throw std::invalid_argument("quadratic_maximize: W is not positive definite");
    out.certificate = (1.0 / (k - 1)) * (lo / hi) * alpha_dks;
  }
  ReductionGraph red = build_reduction_graph(W);
  out.subset = oracle(red.graph, k);
  out.qp_value = quadratic_value(W, out.subset);
  return out;
}

QpSolution brute_force_qp(const Eigen::MatrixXd& W, int k, std::uint64_t budget) {
  const int n = static_cast<int>(W.rows());
  if (k < 1 || k > n) throw std::invalid_argument("brute_force_qp: k out of range");
  if (binomial_capped(n, k, budget) > budget)
    throw std::runtime_error("brute_force_qp: enumeration budget exceeded");
  QpSolution best;
  double best_value = -std::numeric_limits<double>::infinity();
  std::vector<int> comb(k);
  for (int i = 0; i < k; ++i) comb[i] = i;
  while (true) {
    SuperArm arm(comb, n);
    double v = quadratic_value(W, arm);
    if (v > best_value) {
      best_value = v;
      best.subset = arm;
    }
    int i = k - 1;
    while (i >= 0 && comb[i] == n - k + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }
  best.qp_value = best_value;
  return best;
}

}  // namespace cpex
