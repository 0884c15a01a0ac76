#include <doctest.h>

#include <cmath>

#include "cpex/confidence.hpp"
#include "cpex/design_state.hpp"
#include "cpex/environment.hpp"
#include "cpex/identification.hpp"

using namespace cpex;

namespace {

ConfidenceParams params_k2(double r = 1.0, double delta = 0.05) {
  ConfidenceParams p;
  p.noise_bound = r;
  p.k = 2;
  p.delta = delta;
  return p;
}

}  // namespace

TEST_CASE("conf_radius_ellipsoid worked example and monotonicity") {
  ConfidenceParams p = params_k2();
  // k=2, R=1, t=10, K=6, delta=0.05: c = 4 sqrt(2), log argument ~ 8.895
  double c_t = conf_radius_ellipsoid(p, 10, std::log(6.0));
  CHECK(c_t == doctest::Approx(4.0 * std::sqrt(2.0) * std::sqrt(8.895)).epsilon(1e-3));
  CHECK(c_t == doctest::Approx(16.87).epsilon(1e-3));

  for (long t = 1; t < 50; ++t)
    CHECK(conf_radius_ellipsoid(p, t, std::log(6.0)) <
          conf_radius_ellipsoid(p, t + 1, std::log(6.0)));

  ConfidenceParams loose = params_k2(1.0, 0.1);
  CHECK(conf_radius_ellipsoid(loose, 10, std::log(6.0)) < c_t);

  CHECK_THROWS(conf_radius_ellipsoid(p, 0, std::log(6.0)));
  ConfidenceParams bad = params_k2(1.0, 0.9999);
  CHECK_THROWS(conf_radius_ellipsoid(bad, 1, 0.0));  // degenerate log argument
}

TEST_CASE("conf_radius_independent worked example and scaling") {
  ConfidenceParams p = params_k2();
  double c_t = conf_radius_independent(p, 10, 10);
  CHECK(c_t == doctest::Approx(2.0 * std::sqrt(2.0 * 9.406)).epsilon(1e-3));
  CHECK(c_t == doctest::Approx(8.675).epsilon(1e-3));

  ConfidenceParams p4 = p;
  p4.k = 4;  // sigma = kR, so the radius scales linearly in k
  CHECK(conf_radius_independent(p4, 10, 10) == doctest::Approx(2.0 * c_t).epsilon(1e-12));
}

TEST_CASE("SA-FOA gamma fixture") {
  // A = [[2,1,1],[1,2,1],[1,1,2]], M_hat* = {0,1}, M_bar = {0,2}, C_t = 4
  DesignState s(3);
  s.update(SuperArm({0, 1}, 3), 0.0);
  s.update(SuperArm({0, 2}, 3), 0.0);
  s.update(SuperArm({1, 2}, 3), 0.0);
  Eigen::VectorXd diff = SuperArm({0, 2}, 3).indicator() - SuperArm({0, 1}, 3).indicator();
  double gamma = 4.0 / (2.0 * s.ellipsoid_norm(diff));
  CHECK(gamma == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("ICB P1 fixture: Z* = 5") {
  // theta_hat=(3,2,1), d=(1,1,1), C_t=0.5, M_hat*={0,1}
  Eigen::VectorXd theta(3), d(3);
  theta << 3, 2, 1;
  d << 1, 1, 1;
  double c_t = 0.5;
  SuperArm best({0, 1}, 3);
  DecisionClass dc = DecisionClass::top_k(3, 2);
  Eigen::VectorXd u(3);
  for (int i = 0; i < 3; ++i)
    u(i) = theta(i) + (best.contains(i) ? -c_t : c_t) * d(i);
  double constant = 0;
  for (int i : best.indices()) constant += c_t * d(i);
  auto [m, v] = linear_maximize(u, dc, &best);
  CHECK(m == SuperArm({0, 2}, 3));
  CHECK(v + constant == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("zero-noise instance: all four algorithms find the optimum quickly") {
  InstanceSpec spec{4, 2, 1.0, 3};
  Eigen::VectorXd theta = generate_gap_instance(spec);
  DecisionClass dc = DecisionClass::top_k(4, 2);
  SuperArm truth = best_super_arm(theta, dc);

  ConfidenceParams params;
  params.k = 2;
  params.noise_bound = 1e-6;  // R -> 0 limit
  params.delta = 0.05;
  Allocation p = uniform_allocation(*dc.enumerate());
  RunOptions options;
  options.budget = 5000;
  options.seed = 3;

  auto make_env = [&] {
    return std::make_unique<SyntheticEnv>(theta, NoiseModel::gaussian(0.0), 3);
  };

  auto env1 = make_env();
  RunResult saqm = run_saqm(*env1, dc, p, params, greedy_peeling_oracle(), options);
  CHECK(saqm.stopped);
  CHECK(saqm.output == truth);
  CHECK(saqm.samples <= 200);
  CHECK(saqm.samples >= static_cast<long>(p.support.size()));
  CHECK(saqm.diagnostics.empirical_best == truth);

  auto env2 = make_env();
  RunResult ex = run_exhaustive(*env2, dc, p, params, options);
  CHECK(ex.stopped);
  CHECK(ex.output == truth);

  auto env3 = make_env();
  RunResult icb = run_icb(*env3, dc, p, params, options);
  CHECK(icb.stopped);
  CHECK(icb.output == truth);

  auto env4 = make_env();
  RunResult foa = run_safoa(*env4, dc, p, params, greedy_peeling_oracle(), options);
  CHECK(foa.stopped);
  CHECK(foa.output == truth);
}

TEST_CASE("huge epsilon stops right after full rank") {
  InstanceSpec spec{5, 2, 0.5, 9};
  auto env = generate_synthetic(spec);
  DecisionClass dc = DecisionClass::top_k(5, 2);
  Allocation p = uniform_allocation(cyclic_design(5, 2).blocks);
  ConfidenceParams params;
  params.k = 2;
  params.delta = 0.05;
  // any set is epsilon-optimal once eps >= k (theta_max - theta_min)
  params.epsilon = 2.0 * (env->mean_rewards().maxCoeff() - env->mean_rewards().minCoeff()) + 50.0;
  RunOptions options;
  options.budget = 100000;
  RunResult r = run_saqm(*env, dc, p, params, greedy_peeling_oracle(), options);
  CHECK(r.stopped);
  // stop comes as soon as the radii shrink under the epsilon slack
  CHECK(r.samples <= 100);
}

TEST_CASE("budget exhaustion reports stopped=false") {
  InstanceSpec spec{6, 3, 0.1, 5};
  auto env = generate_synthetic(spec, NoiseModel::gaussian(5.0));
  DecisionClass dc = DecisionClass::top_k(6, 3);
  Allocation p = uniform_allocation(cyclic_design(6, 3).blocks);
  ConfidenceParams params;
  params.k = 3;
  RunOptions options;
  options.budget = 50;
  RunResult r = run_icb(*env, dc, p, params, options);
  CHECK(!r.stopped);
  CHECK(r.samples == 50);
  CHECK(r.output.size() == 3);
}

TEST_CASE("identical seeds give identical runs") {
  InstanceSpec spec{6, 2, 0.5, 17};
  DecisionClass dc = DecisionClass::top_k(6, 2);
  Allocation p = uniform_allocation(cyclic_design(6, 2).blocks);
  ConfidenceParams params;
  params.k = 2;
  RunOptions options;
  options.budget = 3000;
  options.seed = 17;
  auto e1 = generate_synthetic(spec);
  auto e2 = generate_synthetic(spec);
  RunResult a = run_saqm(*e1, dc, p, params, greedy_peeling_oracle(), options);
  RunResult b = run_saqm(*e2, dc, p, params, greedy_peeling_oracle(), options);
  CHECK(a.samples == b.samples);
  CHECK(a.output == b.output);
  CHECK(a.stopped == b.stopped);
}

TEST_CASE("SAQM certified bound: Z_t / alpha_t dominates the exhaustive CEM value") {
  InstanceSpec spec{8, 3, 0.5, 21};
  auto env = generate_synthetic(spec);
  DecisionClass dc = DecisionClass::top_k(8, 3);
  Allocation p = uniform_allocation(cyclic_design(8, 3).blocks);
  ConfidenceParams params;
  params.k = 3;
  RunOptions options;
  options.budget = 120;
  options.force_budget = true;
  options.record_ratio = true;
  options.trace_every = 1;
  RunResult r = run_saqm(*env, dc, p, params, greedy_peeling_oracle(), options);
  REQUIRE(!r.trace.empty());
  int checked = 0;
  for (const TraceRow& row : r.trace) {
    if (row.ratio <= 0.0 || row.alpha_t <= 0.0) continue;
    // ratio = Z_t / (C_t max||chi||); the proof needs Z_t/alpha_t >= C_t max||chi||
    CHECK(row.ratio >= row.alpha_t - 1e-9);
    CHECK(row.ratio <= 1.0 + 1e-9);
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("alpha override replaces the spectral certificate") {
  InstanceSpec spec{6, 2, 1.0, 2};
  auto env = generate_synthetic(spec);
  DecisionClass dc = DecisionClass::top_k(6, 2);
  Allocation p = uniform_allocation(cyclic_design(6, 2).blocks);
  ConfidenceParams params;
  params.k = 2;
  RunOptions options;
  options.budget = 80;
  options.force_budget = true;
  options.trace_every = 1;
  options.alpha_override = 0.9;
  RunResult r = run_saqm(*env, dc, p, params, greedy_peeling_oracle(), options);
  REQUIRE(!r.trace.empty());
  for (const TraceRow& row : r.trace)
    if (row.alpha_t > 0.0) CHECK(row.alpha_t == doctest::Approx(std::sqrt(0.9)).epsilon(1e-12));
}

TEST_CASE("statistical smoke: ICB and SAQM are correct on easy instances") {
  DecisionClass dc = DecisionClass::top_k(6, 2);
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    InstanceSpec spec{6, 2, 1.0, seed};
    ConfidenceParams params;
    params.k = 2;
    params.epsilon = 0.5;
    RunOptions options;
    options.budget = 200000;
    options.seed = seed;
    Allocation p = uniform_allocation(cyclic_design(6, 2).blocks);

    auto env = generate_synthetic(spec);
    SuperArm truth = best_super_arm(env->mean_rewards(), dc);
    RunResult icb = run_icb(*env, dc, p, params, options);
    CHECK(icb.stopped);
    CHECK(super_arm_value(env->mean_rewards(), icb.output) >=
          super_arm_value(env->mean_rewards(), truth) - params.epsilon - 1e-12);

    auto env2 = generate_synthetic(spec);
    RunResult saqm = run_saqm(*env2, dc, p, params, greedy_peeling_oracle(), options);
    CHECK(saqm.stopped);
    CHECK(super_arm_value(env2->mean_rewards(), saqm.output) >=
          super_arm_value(env2->mean_rewards(), truth) - params.epsilon - 1e-12);
  }
}
