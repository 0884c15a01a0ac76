#ifndef CPEX_HARNESS_HPP_
#define CPEX_HARNESS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace cpex {

struct EnvironmentSpec {
  std::string type;  // "synthetic" | "crowd"
  int n = 0;
  int k = 0;
  double delta_min = 0.5;
  std::string noise = "gaussian";  // gaussian | uniform
  double noise_scale = 1.0;
  std::string labels;  // crowd label table CSV
  std::string truth;   // crowd gold label CSV
};

struct ExperimentConfig {
  std::string algorithm;  // saqm | safoa | icb | exhaustive
  EnvironmentSpec environment;
  double delta = 0.05;
  double epsilon = 0.0;
  std::optional<double> noise_bound;  // R surrogate override
  std::string allocation = "g";       // uniform | g | cyclic
  std::vector<std::uint64_t> seeds;
  long budget = 10000000;
  std::optional<double> alpha_override;
  int ell = 1;
  long check_every = 1;
  long trace_every = 0;
  bool force_budget = false;
  bool record_ratio = false;
};

// Strict parse: unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& j);

struct ResultRow {
  std::uint64_t seed = 0;
  std::string algorithm;
  int n = 0;
  int k = 0;
  double delta_min = 0.0;
  long samples = 0;
  bool correct = false;
  bool stopped = false;
  double wall_clock_total = 0.0;
  double wall_clock_per_round_mean = 0.0;
  std::string trace_file;
};

// One run per seed, executed in a worker pool capped by BANDIT_CPE_THREADS,
// merged back in seed order. Writes results.csv (plus per-run trace CSVs
// when tracing is on) under out_dir.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const std::string& out_dir);

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path);

struct BenchRow {
  std::string algorithm;
  int n = 0;
  int k = 0;
  long rounds = 0;
  double seconds_per_round = 0.0;
};

// Per-round algorithm cost at k = n/2 over >= 100 measured rounds;
// Exhaustive is skipped with a notice once C(n,k) exceeds its budget.
std::vector<BenchRow> bench_runtime(const std::vector<int>& n_values,
                                    const std::vector<std::string>& algorithms,
                                    long min_rounds = 100);

void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path);

// report: aggregate result CSVs matched by a shell glob
struct AggregateRow {
  std::string algorithm;
  int n = 0;
  int k = 0;
  double delta_min = 0.0;
  long runs = 0;
  double samples_mean = 0.0;
  double samples_stddev = 0.0;  // population
  double correct_rate = 0.0;
  double seconds_mean = 0.0;
  double seconds_stddev = 0.0;
};

std::vector<std::string> expand_glob(const std::string& pattern);
std::vector<ResultRow> read_results_csv(const std::string& path);
std::vector<AggregateRow> aggregate_results(const std::vector<ResultRow>& rows);
void write_report(const std::vector<AggregateRow>& rows, const std::string& out_dir);

// mean ratio per round across trace files (the approximation-precision curve)
void aggregate_ratio_traces(const std::vector<std::string>& trace_paths,
                            const std::string& out_path);

}  // namespace cpex

#endif  // CPEX_HARNESS_HPP_
