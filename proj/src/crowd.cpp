#include "cpex/crowd.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cpex {

CrowdEnv::CrowdEnv(std::vector<std::vector<int>> correct, Eigen::VectorXd accuracy,
                   CrowdSummary summary, std::uint64_t seed)
    : correct_(std::move(correct)),
      accuracy_(std::move(accuracy)),
      summary_(summary),
      rng_(seed) {
  theta_ = Eigen::VectorXd::Zero(summary_.workers);
  for (const auto& row : correct_)
    for (int w = 0; w < summary_.workers; ++w) theta_(w) += row[static_cast<std::size_t>(w)];
  if (summary_.tasks > 0) theta_ /= static_cast<double>(summary_.tasks);
}

double CrowdEnv::pull(const SuperArm& arm) {
  if (arm.ambient() != summary_.workers)
    throw std::invalid_argument("CrowdEnv::pull: arm dimension mismatch");
  const std::size_t task = static_cast<std::size_t>(rng_() % static_cast<std::uint64_t>(summary_.tasks));
  int reward = 0;
  for (int w : arm.indices()) reward += correct_[task][static_cast<std::size_t>(w)];
  return static_cast<double>(reward);
}

std::unique_ptr<Environment> CrowdEnv::clone_with_seed(std::uint64_t seed) const {
  auto env = std::make_unique<CrowdEnv>(correct_, accuracy_, summary_, seed);
  return env;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

std::unique_ptr<CrowdEnv> ingest_crowd(const std::string& labels_path,
                                       const std::string& truth_path, std::uint64_t seed) {
  std::ifstream truth_file(truth_path);
  if (!truth_file) throw std::runtime_error("ingest_crowd: cannot open " + truth_path);
  std::map<std::string, std::string> truth;
  std::string line;
  long line_no = 0;
  while (std::getline(truth_file, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (line_no == 1) {
      if (fields.size() != 2 || fields[0] != "task_id" || fields[1] != "label")
        throw std::runtime_error(truth_path + ":1: expected header task_id,label");
      continue;
    }
    if (fields.size() != 2)
      throw std::runtime_error(truth_path + ":" + std::to_string(line_no) + ": malformed row");
    truth[fields[0]] = fields[1];
  }

  std::ifstream labels_file(labels_path);
  if (!labels_file) throw std::runtime_error("ingest_crowd: cannot open " + labels_path);
  std::map<std::string, int> task_ids;
  std::map<std::string, int> worker_ids;
  struct LabelRow {
    int task, worker;
    std::string label;
  };
  std::vector<LabelRow> rows;
  line_no = 0;
  while (std::getline(labels_file, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (line_no == 1) {
      if (fields.size() != 3 || fields[0] != "task_id" || fields[1] != "worker_id" ||
          fields[2] != "label")
        throw std::runtime_error(labels_path + ":1: expected header task_id,worker_id,label");
      continue;
    }
    if (fields.size() != 3)
      throw std::runtime_error(labels_path + ":" + std::to_string(line_no) + ": malformed row");
    if (!truth.count(fields[0]))
      throw std::runtime_error(labels_path + ":" + std::to_string(line_no) +
                               ": task '" + fields[0] + "' has no gold label");
    int task = static_cast<int>(task_ids.emplace(fields[0], task_ids.size()).first->second);
    int worker = static_cast<int>(worker_ids.emplace(fields[1], worker_ids.size()).first->second);
    rows.push_back({task, worker, fields[2]});
  }
  if (rows.empty()) throw std::runtime_error(labels_path + ": no label rows");

  const int tasks = static_cast<int>(task_ids.size());
  const int workers = static_cast<int>(worker_ids.size());
  std::vector<std::vector<int>> correct(static_cast<std::size_t>(tasks),
                                        std::vector<int>(static_cast<std::size_t>(workers), 0));
  std::vector<std::string> task_name(static_cast<std::size_t>(tasks));
  for (const auto& [name, id] : task_ids) task_name[static_cast<std::size_t>(id)] = name;
  Eigen::VectorXd attempted = Eigen::VectorXd::Zero(workers);
  Eigen::VectorXd hits = Eigen::VectorXd::Zero(workers);
  for (const auto& r : rows) {
    if (r.label.empty()) continue;  // empty cell: the worker skipped this task
    attempted(r.worker) += 1;
    if (r.label == truth[task_name[static_cast<std::size_t>(r.task)]]) {
      hits(r.worker) += 1;
      correct[static_cast<std::size_t>(r.task)][static_cast<std::size_t>(r.worker)] = 1;
    }
  }

  Eigen::VectorXd accuracy = Eigen::VectorXd::Zero(workers);
  std::vector<std::string> warnings;
  std::map<int, std::string> worker_name;
  for (const auto& [name, id] : worker_ids) worker_name[id] = name;
  for (int w = 0; w < workers; ++w) {
    if (attempted(w) > 0) {
      accuracy(w) = hits(w) / attempted(w);
    } else {
      warnings.push_back("worker '" + worker_name[w] + "' labeled no tasks; accuracy 0");
    }
  }

  CrowdSummary summary;
  summary.tasks = tasks;
  summary.workers = workers;
  summary.average_accuracy = accuracy.mean();
  summary.best_accuracy = accuracy.maxCoeff();
  auto env = std::make_unique<CrowdEnv>(std::move(correct), std::move(accuracy), summary, seed);
  for (auto& w : warnings) env->add_warning(std::move(w));
  return env;
}

}  // namespace cpex
