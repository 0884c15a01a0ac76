#include "cpex/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

namespace cpex {

Eigen::MatrixXd Allocation::lambda() const {
  const int n = support.empty() ? 0 : support.front().ambient();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < support.size(); ++i) {
    Eigen::VectorXd chi = support[i].indicator();
    L.noalias() += probs(static_cast<Eigen::Index>(i)) * chi * chi.transpose();
  }
  return L;
}

bool spans_ambient(const std::vector<SuperArm>& support) {
  if (support.empty()) return false;
  const int n = support.front().ambient();
  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i)
    X.col(static_cast<Eigen::Index>(i)) = support[i].indicator();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  return qr.rank() == n;
}

Allocation uniform_allocation(const std::vector<SuperArm>& support) {
  if (support.empty()) throw std::invalid_argument("uniform_allocation: empty support");
  if (!spans_ambient(support))
    throw std::invalid_argument("uniform_allocation: support does not span, non-identifiable");
  Allocation a;
  a.support = support;
  a.probs = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(support.size()),
                                      1.0 / static_cast<double>(support.size()));
  return a;
}

CyclicDesign cyclic_design(int n, int k) {
  if (k < 2 || k >= n) throw std::invalid_argument("cyclic_design: requires 2 <= k < n");
  CyclicDesign out;
  for (int i = 0; i < n; ++i) {
    std::vector<int> block(k);
    for (int j = 0; j < k; ++j) block[j] = (i + j) % n;
    out.blocks.emplace_back(block, n);
  }
  out.gram_singular = !spans_ambient(out.blocks);
  if (out.gram_singular) {
    // swap the block's last element one slot further until rank is restored
    for (int i = 0; i < n && !spans_ambient(out.blocks); ++i) {
      std::vector<int> block(k);
      for (int j = 0; j < k - 1; ++j) block[j] = (i + j) % n;
      block[k - 1] = (i + k) % n;
      out.blocks.emplace_back(block, n);
      ++out.augmented;
    }
    if (!spans_ambient(out.blocks))
      throw std::runtime_error("cyclic_design: augmentation failed to restore rank");
  }
  return out;
}

namespace {

// max_M chi^T Lambda^{-1} chi over the support; Lambda must be PD
double max_support_norm(const Allocation& a, int* argmax = nullptr) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a.lambda());
  // LDLT reports semidefinite matrices as "positive"; reject near-singular
  // pivots explicitly or the line search can walk onto a rank-deficient vertex
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 1e-12)
    return std::numeric_limits<double>::infinity();
  double best = -1.0;
  for (std::size_t i = 0; i < a.support.size(); ++i) {
    Eigen::VectorXd chi = a.support[i].indicator();
    double v = chi.dot(ldlt.solve(chi));
    if (v > best) {
      best = v;
      if (argmax) *argmax = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace

Allocation g_allocation(const DecisionClass& dc, const std::vector<SuperArm>& candidates,
                        int iterations, double prune_threshold) {
  (void)dc;
  if (!spans_ambient(candidates))
    throw std::invalid_argument("g_allocation: candidate support does not span");
  Allocation a = uniform_allocation(candidates);
  double objective = max_support_norm(a);
  for (int it = 0; it < iterations; ++it) {
    int worst = 0;
    max_support_norm(a, &worst);
    // harmonic step with halving line search; never accept an increase
    double gamma = 2.0 / (it + 2.0);
    bool moved = false;
    for (int h = 0; h < 20 && !moved; ++h, gamma *= 0.5) {
      Allocation trial = a;
      trial.probs *= (1.0 - gamma);
      trial.probs(worst) += gamma;
      double trial_objective = max_support_norm(trial);
      if (trial_objective < objective) {
        a = trial;
        objective = trial_objective;
        moved = true;
      }
    }
    if (!moved) break;
  }
  // prune negligible mass and renormalize; keep the unpruned design if the
  // pruned one would lose rank
  Allocation pruned;
  for (std::size_t i = 0; i < a.support.size(); ++i) {
    if (a.probs(static_cast<Eigen::Index>(i)) >= prune_threshold)
      pruned.support.push_back(a.support[i]);
  }
  if (pruned.support.size() < a.support.size() && spans_ambient(pruned.support)) {
    pruned.probs.resize(static_cast<Eigen::Index>(pruned.support.size()));
    Eigen::Index j = 0;
    for (std::size_t i = 0; i < a.support.size(); ++i)
      if (a.probs(static_cast<Eigen::Index>(i)) >= prune_threshold)
        pruned.probs(j++) = a.probs(static_cast<Eigen::Index>(i));
    pruned.probs /= pruned.probs.sum();
    return pruned;
  }
  return a;
}

std::vector<SuperArm> default_candidate_support(const DecisionClass& dc, std::uint64_t seed) {
  const int n = dc.arm_count();
  const int k = dc.super_arm_size();
  std::set<SuperArm> seen;
  std::vector<SuperArm> out;
  auto add = [&](const SuperArm& arm) {
    if (seen.insert(arm).second) out.push_back(arm);
  };
  if (dc.is_top_k() && k < n) {
    for (const SuperArm& b : cyclic_design(n, k).blocks) add(b);
  }
  std::mt19937_64 rng(seed);
  const std::size_t target = static_cast<std::size_t>(3 * n);
  int stale = 0;
  while (out.size() < target && stale < 50 * n) {
    // a random feasible super-arm: greedy basis under random weights
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w(i) = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    SuperArm arm = best_super_arm(w, dc);
    std::size_t before = out.size();
    add(arm);
    stale = out.size() == before ? stale + 1 : 0;
  }
  return out;
}

std::vector<long> round_allocation(const Allocation& p, long t) {
  const long s = static_cast<long>(p.support.size());
  if (t < s) throw std::invalid_argument("round_allocation: t smaller than the support size");
  std::vector<long> counts(static_cast<std::size_t>(s));
  long total = 0;
  for (long i = 0; i < s; ++i) {
    counts[static_cast<std::size_t>(i)] =
        static_cast<long>(std::ceil((t - 0.5 * s) * p.probs(i)));
    total += counts[static_cast<std::size_t>(i)];
  }
  while (total < t) {
    long j = 0;
    double best = std::numeric_limits<double>::infinity();
    for (long i = 0; i < s; ++i) {
      double r = counts[static_cast<std::size_t>(i)] / p.probs(i);
      if (r < best) {
        best = r;
        j = i;
      }
    }
    ++counts[static_cast<std::size_t>(j)];
    ++total;
  }
  while (total > t) {
    long j = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (long i = 0; i < s; ++i) {
      double r = (counts[static_cast<std::size_t>(i)] - 1) / p.probs(i);
      if (r > best) {
        best = r;
        j = i;
      }
    }
    --counts[static_cast<std::size_t>(j)];
    --total;
  }
  return counts;
}

int next_pull(const Allocation& p, const std::vector<long>& counts) {
  if (counts.size() != p.support.size())
    throw std::invalid_argument("next_pull: counts not aligned with the support");
  int best = 0;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    double r = counts[i] / p.probs(static_cast<Eigen::Index>(i));
    if (r < best_ratio) {
      best_ratio = r;
      best = static_cast<int>(i);
    }
  }
  return best;
}

ComplexityReport complexity_report(const Allocation& p, const Eigen::VectorXd& theta,
                                   const DecisionClass& dc, double eps,
                                   std::uint64_t enumeration_budget) {
  const int n = dc.arm_count();
  const int k = dc.super_arm_size();
  Eigen::MatrixXd L = p.lambda();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(L);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 1e-12)
    throw std::runtime_error("complexity_report: Lambda_p is singular");
  Eigen::MatrixXd L_inv = ldlt.solve(Eigen::MatrixXd::Identity(n, n));

  auto norm2 = [&](const SuperArm& arm) {
    double v = 0.0;
    for (int a : arm.indices())
      for (int b : arm.indices()) v += L_inv(a, b);
    return v;
  };

  ComplexityReport out;
  std::optional<std::vector<SuperArm>> all = dc.enumerate(enumeration_budget);
  if (all) {
    for (const SuperArm& arm : *all) out.rho = std::max(out.rho, norm2(arm));
  } else {
    // support plus a deterministic sample of feasible sets: a lower bound
    out.rho_is_lower_bound = true;
    for (const SuperArm& arm : p.support) out.rho = std::max(out.rho, norm2(arm));
    for (const SuperArm& arm : default_candidate_support(dc, 1234567))
      out.rho = std::max(out.rho, norm2(arm));
  }

  // rho': maximize sum over the symmetric difference of sqrt(diag).
  Eigen::VectorXd d = L_inv.diagonal().cwiseMax(0.0).cwiseSqrt();
  if (dc.is_top_k()) {
    // the symmetric difference of two k-sets can be any even set of size up
    // to 2*min(k, n-k): take the largest entries
    std::vector<double> sorted(d.data(), d.data() + n);
    std::sort(sorted.rbegin(), sorted.rend());
    int m = 2 * std::min(k, n - k);
    double sum = 0.0;
    for (int i = 0; i < m; ++i) sum += sorted[static_cast<std::size_t>(i)];
    out.rho_prime = sum * sum;
  } else {
    std::vector<SuperArm> pool;
    if (all && all->size() * all->size() <= enumeration_budget) {
      pool = *all;
    } else {
      out.rho_is_lower_bound = true;
      pool = p.support;
    }
    double best = 0.0;
    for (const SuperArm& a : pool) {
      for (const SuperArm& b : pool) {
        double sum = 0.0;
        for (int e = 0; e < n; ++e)
          if (a.contains(e) != b.contains(e)) sum += d(e);
        best = std::max(best, sum);
      }
    }
    out.rho_prime = best * best;
  }

  GapReport gaps = gap_report(theta, dc);
  const double denom = (gaps.delta_min + eps) * (gaps.delta_min + eps);
  out.h_eps = out.rho / denom;
  out.h_eps_prime = out.rho_prime / denom;
  return out;
}

}  // namespace cpex
