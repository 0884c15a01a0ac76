#include "cpex/decision_class.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cpex {

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

std::uint64_t binomial_capped(int n, int k, std::uint64_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    // c * (n-k+i) / i, watching the cap before overflow
    if (c > cap) return cap + 1;
    c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return std::min(c, cap + 1);
}

DecisionClass DecisionClass::top_k(int n, int k) {
  if (k < 2 || k > n)
    throw std::invalid_argument("DecisionClass::top_k: requires 2 <= k <= n");
  DecisionClass dc;
  dc.n_ = n;
  dc.k_ = k;
  dc.log_cardinality_ = log_binomial(n, k);
  return dc;
}

DecisionClass DecisionClass::matroid(int n, IndependenceOracle oracle) {
  if (n < 1 || !oracle) throw std::invalid_argument("DecisionClass::matroid: bad arguments");
  if (!oracle({})) throw std::invalid_argument("DecisionClass::matroid: oracle rejects the empty set");
  DecisionClass dc;
  dc.n_ = n;
  dc.oracle_ = std::move(oracle);
  // rank via unweighted greedy
  std::vector<int> basis;
  for (int e = 0; e < n; ++e) {
    basis.push_back(e);
    if (!dc.oracle_(basis)) basis.pop_back();
  }
  dc.k_ = static_cast<int>(basis.size());
  // downward-closure spot check: every singleton inside an accepted set must
  // itself be independent
  for (int e : basis)
    if (!dc.oracle_({e}))
      throw std::invalid_argument(
          "DecisionClass::matroid: oracle violates downward closure (rejects {" +
          std::to_string(e) + "} inside an accepted set)");
  dc.log_cardinality_ = dc.k_ * std::log(static_cast<double>(n));
  return dc;
}

bool DecisionClass::independent(const std::vector<int>& subset) const {
  if (!oracle_) return static_cast<int>(subset.size()) <= k_;
  return oracle_(subset);
}

bool DecisionClass::is_member(const SuperArm& arm) const {
  if (arm.ambient() != n_ || arm.size() != k_) return false;
  return independent(arm.indices());
}

std::optional<std::vector<SuperArm>> DecisionClass::enumerate(std::uint64_t budget) const {
  if (binomial_capped(n_, k_, budget) > budget) return std::nullopt;
  std::vector<SuperArm> out;
  std::vector<int> comb(k_);
  for (int i = 0; i < k_; ++i) comb[i] = i;
  while (true) {
    if (independent(comb)) out.emplace_back(comb, n_);
    int i = k_ - 1;
    while (i >= 0 && comb[i] == n_ - k_ + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < k_; ++j) comb[j] = comb[j - 1] + 1;
  }
  return out;
}

namespace {

// Greedy over the ground set in weight-descending order (ties by smaller
// index). For matroids this yields the maximum-weight basis; for Top-k it is
// the k largest entries with the lexicographically smallest index set.
SuperArm greedy_basis(const Eigen::VectorXd& weights, const DecisionClass& dc) {
  const int n = dc.arm_count();
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (weights(a) != weights(b)) return weights(a) > weights(b);
    return a < b;
  });

  std::vector<int> chosen;
  std::vector<std::pair<std::vector<int>, int>> rejected;  // (set at rejection, element)
  for (int e : order) {
    chosen.push_back(e);
    std::vector<int> probe = chosen;
    std::sort(probe.begin(), probe.end());
    if (dc.independent(probe)) continue;
    chosen.pop_back();
    if (!dc.is_top_k()) rejected.emplace_back(probe, e);
  }
  if (static_cast<int>(chosen.size()) != dc.super_arm_size())
    throw std::runtime_error("greedy_basis: oracle produced a basis of the wrong rank");

  SuperArm basis(chosen, n);
  // downward-closure consistency: a set rejected along the way must not be
  // accepted as a subset of the final basis plus the rejected element
  for (const auto& [probe, e] : rejected) {
    std::vector<int> super = basis.indices();
    if (basis.contains(e)) continue;
    super.push_back(e);
    std::sort(super.begin(), super.end());
    bool subset_of_super = true;
    for (int x : probe)
      if (!std::binary_search(super.begin(), super.end(), x)) { subset_of_super = false; break; }
    if (subset_of_super && dc.independent(super))
      throw std::runtime_error("greedy_basis: inconsistent matroid oracle (accepted a superset of a rejected set)");
  }
  return basis;
}

}  // namespace

SuperArm best_super_arm(const Eigen::VectorXd& theta, const DecisionClass& dc) {
  if (theta.size() != dc.arm_count())
    throw std::invalid_argument("best_super_arm: dimension mismatch");
  return greedy_basis(theta, dc);
}

std::pair<SuperArm, double> linear_maximize(const Eigen::VectorXd& weights,
                                            const DecisionClass& dc,
                                            const SuperArm* exclude) {
  if (weights.size() != dc.arm_count())
    throw std::invalid_argument("linear_maximize: dimension mismatch");
  SuperArm best = greedy_basis(weights, dc);
  if (!exclude || best != *exclude)
    return {best, super_arm_value(weights, best)};

  // the unconstrained optimum is the excluded set: best single exchange
  const int n = dc.arm_count();
  std::optional<SuperArm> runner;
  double runner_value = -std::numeric_limits<double>::infinity();
  for (int e : exclude->indices()) {
    for (int f = 0; f < n; ++f) {
      if (exclude->contains(f)) continue;
      std::vector<int> cand = exclude->indices();
      cand.erase(std::find(cand.begin(), cand.end(), e));
      cand.push_back(f);
      std::sort(cand.begin(), cand.end());
      if (!dc.independent(cand)) continue;
      SuperArm arm(cand, n);
      double v = super_arm_value(weights, arm);
      if (v > runner_value || (v == runner_value && runner && arm < *runner)) {
        runner = arm;
        runner_value = v;
      }
    }
  }
  if (!runner)
    throw std::runtime_error("linear_maximize: exclusion impossible (decision class has a single member)");
  return {*runner, runner_value};
}

GapReport gap_report(const Eigen::VectorXd& theta, const DecisionClass& dc) {
  SuperArm best = best_super_arm(theta, dc);
  auto [runner, runner_value] = linear_maximize(theta, dc, &best);
  (void)runner;
  GapReport report;
  report.best = best;
  report.delta_min = super_arm_value(theta, best) - runner_value;
  if (report.delta_min < 0) report.delta_min = 0;
  return report;
}

}  // namespace cpex
