#include "cpex/identification.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

#include "cpex/design_state.hpp"

namespace cpex {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Shared sampling loop: initialization pulls every support element once,
// then the tracking rule argmin T_M / p_M takes over. Environment sampling
// time is kept out of the algorithm clock.
class RunLoop {
 public:
  RunLoop(Environment& env, const Allocation& p, const RunOptions& options)
      : env_(env), p_(p), options_(options), state_(env.arm_count()),
        counts_(p.support.size(), 0) {
    if (p_.support.empty()) throw std::invalid_argument("run: empty allocation support");
  }

  void initialize() {
    for (std::size_t i = 0; i < p_.support.size(); ++i) pull(static_cast<int>(i));
  }

  void track() { pull(next_pull(p_, counts_)); }

  bool exhausted() const { return state_.rounds() >= options_.budget; }
  bool check_now() const {
    return state_.invertible() && state_.rounds() % options_.check_every == 0;
  }

  DesignState& state() { return state_; }
  long rounds() const { return state_.rounds(); }

  void start_algo_clock() { mark_ = Clock::now(); }
  void stop_algo_clock() {
    algo_seconds_ += seconds_since(mark_);
    ++measured_rounds_;
  }
  double algo_seconds() const { return algo_seconds_; }
  long measured_rounds() const { return measured_rounds_; }

 private:
  void pull(int support_index) {
    const SuperArm& arm = p_.support[static_cast<std::size_t>(support_index)];
    double reward = env_.pull(arm);
    auto mark = Clock::now();
    state_.update(arm, reward);
    algo_seconds_ += seconds_since(mark);
    ++counts_[static_cast<std::size_t>(support_index)];
  }

  Environment& env_;
  const Allocation& p_;
  const RunOptions& options_;
  DesignState state_;
  std::vector<long> counts_;
  double algo_seconds_ = 0.0;
  long measured_rounds_ = 0;
  Clock::time_point mark_;
};

// Exhaustive max of ||chi_M||_{A^{-1}} over the decision class, shared by
// the ratio measurement and the exhaustive-search stopping rule.
struct NormScratch {
  // chi^T A^{-1} chi via index sums; cheaper than forming indicators
  static double quad(const Eigen::MatrixXd& A_inv, const SuperArm& arm) {
    double v = 0.0;
    for (int a : arm.indices())
      for (int b : arm.indices()) v += A_inv(a, b);
    return std::max(v, 0.0);
  }
};

struct Tracer {
  const RunOptions& options;
  RunResult& result;

  bool due(long t) const {
    return options.trace_every > 0 && t % options.trace_every == 0;
  }
  void record(const RunLoop& loop, long t, double best_value, double margin, double alpha,
              double ratio) {
    TraceRow row;
    row.t = t;
    row.empirical_best_value = best_value;
    row.margin = margin;
    row.alpha_t = alpha;
    row.ratio = ratio;
    row.round_seconds = loop.measured_rounds() > 0
                            ? loop.algo_seconds() / loop.measured_rounds()
                            : 0.0;
    result.trace.push_back(row);
  }
};

void finalize(RunLoop& loop, RunResult& result) {
  result.samples = loop.rounds();
  result.algo_seconds = loop.algo_seconds();
  result.measured_rounds = loop.measured_rounds();
}

}  // namespace

RunResult run_saqm(Environment& env, const DecisionClass& dc, const Allocation& p,
                   const ConfidenceParams& params, const DksOracle& oracle,
                   const RunOptions& options) {
  if (dc.super_arm_size() < 2) throw std::invalid_argument("run_saqm: requires k >= 2");
  RunLoop loop(env, p, options);
  RunResult result;
  Tracer tracer{options, result};
  const double logK = dc.log_cardinality();
  const int k = dc.super_arm_size();

  std::optional<std::vector<SuperArm>> all;
  if (options.record_ratio) all = dc.enumerate(options.enumeration_budget);

  loop.initialize();
  while (!loop.exhausted()) {
    loop.track();
    if (!loop.check_now()) continue;
    loop.start_algo_clock();
    const DesignState& state = loop.state();
    const long t = state.rounds();
    const Eigen::VectorXd& theta_hat = state.theta_hat();

    SuperArm best = best_super_arm(theta_hat, dc);
    const double best_value = super_arm_value(theta_hat, best);
    const double radius = conf_radius_ellipsoid(params, t, logK);

    QpSolution qp = quadratic_maximize(state.inverse(), k, oracle,
                                       options.alpha_override.value_or(1.0),
                                       /*want_certificate=*/!options.alpha_override);
    const double cem_value = state.ellipsoid_norm(qp.subset.indicator());
    const double z = radius * cem_value;
    // any alpha-approximation for QP is a sqrt(alpha)-approximation for CEM
    const double alpha_t = std::sqrt(options.alpha_override ? *options.alpha_override
                                                            : *qp.certificate);

    auto [challenger, challenger_value] = linear_maximize(theta_hat, dc, &best);
    const double lhs = best_value - radius * state.ellipsoid_norm(best.indicator());
    const double rhs = challenger_value + z / alpha_t - params.epsilon;
    const double margin = lhs - rhs;

    double ratio = 0.0;
    if (all) {
      double max_norm2 = 0.0;
      for (const SuperArm& arm : *all)
        max_norm2 = std::max(max_norm2, NormScratch::quad(state.inverse(), arm));
      if (max_norm2 > 0.0) ratio = cem_value / std::sqrt(max_norm2);
    }

    result.diagnostics = {best, challenger, best_value - challenger_value, radius};
    loop.stop_algo_clock();
    if (tracer.due(t)) tracer.record(loop, t, best_value, margin, alpha_t, ratio);
    if (margin >= 0.0 && !options.force_budget) {
      result.output = best;
      result.stopped = true;
      if (!tracer.due(t)) tracer.record(loop, t, best_value, margin, alpha_t, ratio);
      break;
    }
  }
  if (!result.stopped && loop.state().invertible())
    result.output = best_super_arm(loop.state().theta_hat(), dc);
  finalize(loop, result);
  return result;
}

RunResult run_safoa(Environment& env, const DecisionClass& dc, const Allocation& p,
                    const ConfidenceParams& params, const DksOracle& oracle,
                    const RunOptions& options) {
  if (dc.super_arm_size() < 2) throw std::invalid_argument("run_safoa: requires k >= 2");
  RunLoop loop(env, p, options);
  RunResult result;
  Tracer tracer{options, result};
  const double logK = dc.log_cardinality();
  const int n = dc.arm_count();
  const int k = dc.super_arm_size();
  const long m = static_cast<long>(options.ell) * n;
  std::mt19937_64 rng(options.seed ^ 0x853c49e6748fea9bull);

  loop.initialize();
  while (!loop.exhausted()) {
    loop.track();
    if (!loop.check_now()) continue;
    loop.start_algo_clock();
    const DesignState& state = loop.state();
    const long t = state.rounds();
    const Eigen::VectorXd& theta_hat = state.theta_hat();
    const Eigen::MatrixXd& A_inv = state.inverse();

    SuperArm best = best_super_arm(theta_hat, dc);
    const Eigen::VectorXd chi_best = best.indicator();
    const double best_value = super_arm_value(theta_hat, best);
    const double radius = conf_radius_ellipsoid(params, t, logK);

    bool best_is_whole_support = p.support.size() == 1 && p.support.front() == best;
    if (best_is_whole_support)
      throw std::runtime_error("run_safoa: support holds only the empirical best, no reference draw");

    // candidates accumulate across all m draws; the best one under the
    // original objective defines Z'_t
    std::set<SuperArm> candidates;
    const Eigen::VectorXd a_inv_best = A_inv * chi_best;
    for (long i = 0; i < m; ++i) {
      const SuperArm* drawn = nullptr;
      do {
        drawn = &p.support[static_cast<std::size_t>(rng() % p.support.size())];
      } while (*drawn == best);
      const double gap_norm = state.ellipsoid_norm(drawn->indicator() - chi_best);
      if (gap_norm <= 0.0) continue;
      const double gamma = radius / (2.0 * gap_norm);
      Eigen::MatrixXd surrogate = gamma * A_inv;
      surrogate.diagonal() -= 2.0 * gamma * a_inv_best;
      surrogate.diagonal() += theta_hat;
      // the surrogate need not be PD: clamped reduction, no certificate
      ReductionGraph red = build_reduction_graph(surrogate);
      SuperArm cand = oracle(red.graph, k);
      if (cand != best) candidates.insert(cand);
    }

    // no challenger sampled: every draw's surrogate maximizer was M_hat*
    // itself, so F = {M_hat*} and Z' degenerates to theta_hat(M_hat*)
    double cand_max = -std::numeric_limits<double>::infinity();
    SuperArm challenger = best;
    for (const SuperArm& cand : candidates) {
      double v = super_arm_value(theta_hat, cand) +
                 radius * state.ellipsoid_norm(cand.indicator() - chi_best);
      if (v > cand_max) {
        cand_max = v;
        challenger = cand;
      }
    }
    const double z_prime = std::max(best_value, cand_max);
    const double margin = params.epsilon / 2.0 - (z_prime - best_value);

    result.diagnostics = {best, challenger,
                          best_value - super_arm_value(theta_hat, challenger), radius};
    loop.stop_algo_clock();
    if (tracer.due(t)) tracer.record(loop, t, best_value, margin, 0.0, 0.0);
    if (margin >= 0.0 && !options.force_budget) {
      result.output = best;
      result.stopped = true;
      if (!tracer.due(t)) tracer.record(loop, t, best_value, margin, 0.0, 0.0);
      break;
    }
  }
  if (!result.stopped && loop.state().invertible())
    result.output = best_super_arm(loop.state().theta_hat(), dc);
  finalize(loop, result);
  return result;
}

RunResult run_icb(Environment& env, const DecisionClass& dc, const Allocation& p,
                  const ConfidenceParams& params, const RunOptions& options) {
  RunLoop loop(env, p, options);
  RunResult result;
  Tracer tracer{options, result};
  const int n = dc.arm_count();

  loop.initialize();
  while (!loop.exhausted()) {
    loop.track();
    if (!loop.check_now()) continue;
    loop.start_algo_clock();
    const DesignState& state = loop.state();
    const long t = state.rounds();
    const Eigen::VectorXd& theta_hat = state.theta_hat();

    SuperArm best = best_super_arm(theta_hat, dc);
    const double best_value = super_arm_value(theta_hat, best);
    const double radius = conf_radius_independent(params, t, n);
    const Eigen::VectorXd d = state.inverse().diagonal().cwiseMax(0.0).cwiseSqrt();

    // P1 as a plain linear maximization: |chi_M(i) - chi_best(i)| splits into
    // +d_i off the best set, -d_i on it, plus the constant sum over the best
    Eigen::VectorXd u = theta_hat + radius * d;
    double constant = 0.0;
    for (int e : best.indices()) {
      u(e) = theta_hat(e) - radius * d(e);
      constant += radius * d(e);
    }
    auto [challenger, challenger_value] = linear_maximize(u, dc, &best);
    const double z_star = challenger_value + constant;
    const double margin = params.epsilon - (z_star - best_value);

    result.diagnostics = {best, challenger,
                          best_value - super_arm_value(theta_hat, challenger), radius};
    loop.stop_algo_clock();
    if (tracer.due(t)) tracer.record(loop, t, best_value, margin, 0.0, 0.0);
    if (margin > 0.0 && !options.force_budget) {
      result.output = best;
      result.stopped = true;
      if (!tracer.due(t)) tracer.record(loop, t, best_value, margin, 0.0, 0.0);
      break;
    }
  }
  if (!result.stopped && loop.state().invertible())
    result.output = best_super_arm(loop.state().theta_hat(), dc);
  finalize(loop, result);
  return result;
}

RunResult run_exhaustive(Environment& env, const DecisionClass& dc, const Allocation& p,
                         const ConfidenceParams& params, const RunOptions& options) {
  auto all = dc.enumerate(options.enumeration_budget);
  if (!all)
    throw std::runtime_error("run_exhaustive: decision class exceeds the enumeration budget");
  RunLoop loop(env, p, options);
  RunResult result;
  Tracer tracer{options, result};
  const double logK = dc.log_cardinality();

  loop.initialize();
  while (!loop.exhausted()) {
    loop.track();
    if (!loop.check_now()) continue;
    loop.start_algo_clock();
    const DesignState& state = loop.state();
    const long t = state.rounds();
    const Eigen::VectorXd& theta_hat = state.theta_hat();
    const Eigen::MatrixXd& A_inv = state.inverse();

    SuperArm best = best_super_arm(theta_hat, dc);
    const double best_value = super_arm_value(theta_hat, best);
    const double radius = conf_radius_ellipsoid(params, t, logK);

    // ||chi_M - chi_best||^2 = q(M) - 2 chi_M . v + q(best)
    const Eigen::VectorXd v = A_inv * best.indicator();
    const double q_best = NormScratch::quad(A_inv, best);
    double z_star = -std::numeric_limits<double>::infinity();
    SuperArm challenger;
    for (const SuperArm& arm : *all) {
      if (arm == best) continue;
      double dot = 0.0;
      for (int e : arm.indices()) dot += v(e);
      double gap2 = std::max(NormScratch::quad(A_inv, arm) - 2.0 * dot + q_best, 0.0);
      double value = super_arm_value(theta_hat, arm) + radius * std::sqrt(gap2);
      if (value > z_star) {
        z_star = value;
        challenger = arm;
      }
    }
    const double margin = params.epsilon - (z_star - best_value);

    result.diagnostics = {best, challenger,
                          best_value - super_arm_value(theta_hat, challenger), radius};
    loop.stop_algo_clock();
    if (tracer.due(t)) tracer.record(loop, t, best_value, margin, 0.0, 0.0);
    if (margin > 0.0 && !options.force_budget) {
      result.output = best;
      result.stopped = true;
      if (!tracer.due(t)) tracer.record(loop, t, best_value, margin, 0.0, 0.0);
      break;
    }
  }
  if (!result.stopped && loop.state().invertible())
    result.output = best_super_arm(loop.state().theta_hat(), dc);
  finalize(loop, result);
  return result;
}

}  // namespace cpex
