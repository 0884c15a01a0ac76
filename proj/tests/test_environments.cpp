#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cpex/crowd.hpp"
#include "cpex/decision_class.hpp"
#include "cpex/environment.hpp"

using namespace cpex;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream f(path, std::ios::binary);
  f << content;
  return path;
}

}  // namespace

TEST_CASE("gap-controlled generator examples") {
  for (std::uint64_t seed : {1, 7, 42}) {
    InstanceSpec spec{5, 2, 0.3, seed};
    Eigen::VectorXd theta = generate_gap_instance(spec);
    DecisionClass dc = DecisionClass::top_k(5, 2);
    GapReport g = gap_report(theta, dc);
    CHECK(g.delta_min == doctest::Approx(0.3).epsilon(1e-12));
    for (int i = 0; i < 5; ++i) {
      CHECK(theta(i) <= 1.0);
      CHECK(theta(i) >= -1.0);
    }
  }

  // delta_min = 0: at least two optimal super-arms
  Eigen::VectorXd tied = generate_gap_instance({4, 2, 0.0, 11});
  DecisionClass dc = DecisionClass::top_k(4, 2);
  GapReport g = gap_report(tied, dc);
  CHECK(g.delta_min == doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS(generate_gap_instance({3, 3, 0.5, 1}));  // needs k+1 <= n
  CHECK_THROWS(generate_gap_instance({5, 2, 1.5, 1}));
}

TEST_CASE("gap corpus n=10 k=5 over 10 seeds") {
  DecisionClass dc = DecisionClass::top_k(10, 5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Eigen::VectorXd theta = generate_gap_instance({10, 5, 0.25, seed});
    CHECK(gap_report(theta, dc).delta_min == doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("synthetic pulls: zero noise, determinism, mean") {
  Eigen::VectorXd theta(4);
  theta << 0.5, 0.1, -0.2, 0.9;
  SuperArm m({0, 3}, 4);

  SyntheticEnv quiet(theta, NoiseModel::gaussian(0.0), 1);
  CHECK(quiet.pull(m) == doctest::Approx(1.4).epsilon(1e-12));

  SyntheticEnv a(theta, NoiseModel::gaussian(1.0), 99);
  SyntheticEnv b(theta, NoiseModel::gaussian(1.0), 99);
  for (int i = 0; i < 200; ++i) CHECK(a.pull(m) == b.pull(m));  // bitwise

  auto c = a.clone_with_seed(7);
  double sum = 0;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i) sum += c->pull(m);
  double mean = sum / trials;
  CHECK(std::abs(mean - 1.4) <= 3.0 * std::sqrt(2.0 / trials));

  SyntheticEnv u(theta, NoiseModel::uniform(0.5), 3);
  for (int i = 0; i < 1000; ++i) {
    double r = u.pull(m);
    CHECK(r >= 1.4 - 1.0);
    CHECK(r <= 1.4 + 1.0);
  }
}

TEST_CASE("crowd ingestion example") {
  auto labels = write_temp("labels_ok.csv",
                           "task_id,worker_id,label\n"
                           "t1,w0,A\n"
                           "t1,w1,A\n"
                           "t2,w0,B\n"
                           "t2,w1,A\n");
  auto truth = write_temp("truth_ok.csv",
                          "task_id,label\n"
                          "t1,A\n"
                          "t2,B\n");
  auto env = ingest_crowd(labels.string(), truth.string(), 5);
  CHECK(env->summary().tasks == 2);
  CHECK(env->summary().workers == 2);
  CHECK(env->accuracy()(0) == doctest::Approx(1.0));
  CHECK(env->accuracy()(1) == doctest::Approx(0.5));
  CHECK(env->summary().average_accuracy == doctest::Approx(0.75));
  CHECK(env->summary().best_accuracy == doctest::Approx(1.0));

  // pull({0,1}) is 2 on task t1 and 1 on task t2, uniformly
  SuperArm both({0, 1}, 2);
  bool saw1 = false, saw2 = false;
  double total = 0;
  const int trials = 4000;
  for (int i = 0; i < trials; ++i) {
    double r = env->pull(both);
    CHECK((r == 1.0 || r == 2.0));
    saw1 |= r == 1.0;
    saw2 |= r == 2.0;
    total += r;
  }
  CHECK(saw1);
  CHECK(saw2);
  CHECK(std::abs(total / trials - 1.5) < 0.05);

  // expected reward equals summed accuracies on dense tables
  CHECK(env->mean_rewards().sum() == doctest::Approx(1.5));
}

TEST_CASE("crowd worker with no labels gets accuracy 0 and a warning") {
  auto labels = write_temp("labels_skip.csv",
                           "task_id,worker_id,label\n"
                           "t1,w0,A\n"
                           "t1,w1,\n"
                           "t2,w0,A\n"
                           "t2,w1,\n");
  auto truth = write_temp("truth_skip.csv",
                          "task_id,label\n"
                          "t1,A\n"
                          "t2,A\n");
  auto env = ingest_crowd(labels.string(), truth.string());
  CHECK(env->accuracy()(1) == doctest::Approx(0.0));
  CHECK(!env->warnings().empty());
}

TEST_CASE("crowd ingestion errors carry line numbers") {
  auto truth = write_temp("truth_err.csv", "task_id,label\nt1,A\n");
  auto bad_row = write_temp("labels_bad.csv",
                            "task_id,worker_id,label\nt1,w0,A\nonly_one_field\n");
  try {
    ingest_crowd(bad_row.string(), truth.string());
    FAIL("expected malformed-row error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }

  auto no_gold = write_temp("labels_nogold.csv",
                            "task_id,worker_id,label\nt1,w0,A\nt9,w0,A\n");
  CHECK_THROWS(ingest_crowd(no_gold.string(), truth.string()));

  auto bad_header = write_temp("labels_hdr.csv", "task,worker,label\nt1,w0,A\n");
  CHECK_THROWS(ingest_crowd(bad_header.string(), truth.string()));
}

TEST_CASE("crowd rewards are integers in [0,k]") {
  auto labels = write_temp("labels_int.csv",
                           "task_id,worker_id,label\n"
                           "t1,w0,A\nt1,w1,B\nt1,w2,A\n"
                           "t2,w0,B\nt2,w1,B\nt2,w2,A\n");
  auto truth = write_temp("truth_int.csv", "task_id,label\nt1,A\nt2,B\n");
  auto env = ingest_crowd(labels.string(), truth.string(), 2);
  SuperArm m({0, 1, 2}, 3);
  for (int i = 0; i < 500; ++i) {
    double r = env->pull(m);
    CHECK(r == std::floor(r));
    CHECK(r >= 0.0);
    CHECK(r <= 3.0);
  }
}
