#ifndef CPEX_CROWD_HPP_
#define CPEX_CROWD_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "cpex/environment.hpp"

namespace cpex {

struct CrowdSummary {
  int tasks = 0;
  int workers = 0;
  double average_accuracy = 0.0;  // mean over workers of correct/attempted
  double best_accuracy = 0.0;
};

// Crowdsourcing-style environment built from a task x worker label table.
// A pull draws one task uniformly at random and returns how many workers in
// the pulled set labeled it correctly; missing labels score zero.
class CrowdEnv final : public Environment {
 public:
  CrowdEnv(std::vector<std::vector<int>> correct, Eigen::VectorXd accuracy,
           CrowdSummary summary, std::uint64_t seed);

  int arm_count() const override { return summary_.workers; }
  double pull(const SuperArm& arm) override;
  // expected reward contribution per worker: correct / #tasks
  const Eigen::VectorXd& mean_rewards() const override { return theta_; }
  std::unique_ptr<Environment> clone_with_seed(std::uint64_t seed) const override;

  const CrowdSummary& summary() const { return summary_; }
  // per-worker correct/attempted, as reported in dataset summaries
  const Eigen::VectorXd& accuracy() const { return accuracy_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

 private:
  std::vector<std::vector<int>> correct_;  // [task][worker] in {0,1}
  Eigen::VectorXd accuracy_;
  Eigen::VectorXd theta_;
  CrowdSummary summary_;
  std::vector<std::string> warnings_;
  std::mt19937_64 rng_;
};

// labels CSV: header task_id,worker_id,label; truth CSV: header task_id,label.
// Malformed rows and tasks without a gold label are reported with line numbers.
std::unique_ptr<CrowdEnv> ingest_crowd(const std::string& labels_path,
                                       const std::string& truth_path,
                                       std::uint64_t seed = 0);

}  // namespace cpex

#endif  // CPEX_CROWD_HPP_
