#include "cpex/harness.hpp"

#include <glob.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <semaphore>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cpex/crowd.hpp"
#include "cpex/identification.hpp"

namespace cpex {

namespace {

const std::vector<std::string> kAlgorithms = {"saqm", "safoa", "icb", "exhaustive"};

void require_known_keys(const nlohmann::json& j, const std::vector<std::string>& known,
                        const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
  require_known_keys(j, {"algorithm", "environment", "delta", "epsilon", "noise_bound",
                         "allocation", "seeds", "budget", "alpha_override", "ell",
                         "check_every", "trace_every", "force_budget", "record_ratio"},
                     "top level");
  ExperimentConfig c;
  c.algorithm = j.at("algorithm").get<std::string>();
  if (std::find(kAlgorithms.begin(), kAlgorithms.end(), c.algorithm) == kAlgorithms.end())
    throw std::invalid_argument("config: unknown algorithm '" + c.algorithm + "'");

  const auto& env = j.at("environment");
  require_known_keys(env, {"type", "n", "k", "delta_min", "noise", "noise_scale",
                           "labels", "truth"},
                     "environment");
  c.environment.type = env.at("type").get<std::string>();
  if (c.environment.type == "synthetic") {
    c.environment.n = env.at("n").get<int>();
    c.environment.k = env.at("k").get<int>();
    c.environment.delta_min = env.value("delta_min", 0.5);
    c.environment.noise = env.value("noise", std::string("gaussian"));
    c.environment.noise_scale = env.value("noise_scale", 1.0);
    if (c.environment.noise != "gaussian" && c.environment.noise != "uniform")
      throw std::invalid_argument("config: noise must be gaussian or uniform");
  } else if (c.environment.type == "crowd") {
    c.environment.labels = env.at("labels").get<std::string>();
    c.environment.truth = env.at("truth").get<std::string>();
    c.environment.k = env.at("k").get<int>();
  } else {
    throw std::invalid_argument("config: environment type must be synthetic or crowd");
  }

  c.delta = j.value("delta", 0.05);
  c.epsilon = j.value("epsilon", 0.0);
  if (j.contains("noise_bound")) c.noise_bound = j.at("noise_bound").get<double>();
  c.allocation = j.value("allocation", std::string("g"));
  if (c.allocation != "uniform" && c.allocation != "g" && c.allocation != "cyclic")
    throw std::invalid_argument("config: allocation must be uniform, g or cyclic");
  c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (c.seeds.empty()) throw std::invalid_argument("config: seeds must be non-empty");
  c.budget = j.value("budget", 10000000L);
  if (j.contains("alpha_override")) c.alpha_override = j.at("alpha_override").get<double>();
  c.ell = j.value("ell", 1);
  c.check_every = j.value("check_every", 1L);
  c.trace_every = j.value("trace_every", 0L);
  c.force_budget = j.value("force_budget", false);
  c.record_ratio = j.value("record_ratio", false);
  if (c.delta <= 0 || c.delta >= 1) throw std::invalid_argument("config: delta must lie in (0,1)");
  if (c.epsilon < 0) throw std::invalid_argument("config: epsilon must be nonnegative");
  return c;
}

namespace {

struct SeedRun {
  ResultRow row;
  std::vector<TraceRow> trace;
};

Allocation build_allocation(const ExperimentConfig& config, const DecisionClass& dc,
                            std::uint64_t seed) {
  if (config.allocation == "cyclic")
    return uniform_allocation(cyclic_design(dc.arm_count(), dc.super_arm_size()).blocks);
  auto candidates = default_candidate_support(dc, seed);
  if (config.allocation == "uniform") return uniform_allocation(candidates);
  return g_allocation(dc, candidates);
}

SeedRun run_one_seed(const ExperimentConfig& config, std::uint64_t seed) {
  std::unique_ptr<Environment> env;
  double delta_min = config.environment.delta_min;
  if (config.environment.type == "synthetic") {
    InstanceSpec spec{config.environment.n, config.environment.k, delta_min, seed};
    NoiseModel noise = config.environment.noise == "gaussian"
                           ? NoiseModel::gaussian(config.environment.noise_scale)
                           : NoiseModel::uniform(config.environment.noise_scale);
    env = generate_synthetic(spec, noise);
  } else {
    env = ingest_crowd(config.environment.labels, config.environment.truth, seed);
  }

  DecisionClass dc = DecisionClass::top_k(env->arm_count(), config.environment.k);
  Allocation p = build_allocation(config, dc, seed);

  ConfidenceParams params;
  params.k = dc.super_arm_size();
  params.delta = config.delta;
  params.epsilon = config.epsilon;
  if (config.noise_bound) {
    params.noise_bound = *config.noise_bound;
  } else if (config.environment.type == "synthetic") {
    params.noise_bound = config.environment.noise_scale;
  } else {
    params.noise_bound = 0.5;  // per-worker rewards are 0/1
  }

  RunOptions options;
  options.budget = config.budget;
  options.check_every = config.check_every;
  options.trace_every = config.trace_every;
  options.force_budget = config.force_budget;
  options.record_ratio = config.record_ratio;
  options.seed = seed;
  options.alpha_override = config.alpha_override;
  options.ell = config.ell;

  RunResult result;
  if (config.algorithm == "saqm") {
    result = run_saqm(*env, dc, p, params, greedy_peeling_oracle(), options);
  } else if (config.algorithm == "safoa") {
    result = run_safoa(*env, dc, p, params, greedy_peeling_oracle(), options);
  } else if (config.algorithm == "icb") {
    result = run_icb(*env, dc, p, params, options);
  } else {
    result = run_exhaustive(*env, dc, p, params, options);
  }

  SeedRun out;
  out.row.seed = seed;
  out.row.algorithm = config.algorithm;
  out.row.n = env->arm_count();
  out.row.k = dc.super_arm_size();
  out.row.delta_min = config.environment.type == "synthetic" ? delta_min : 0.0;
  out.row.samples = result.samples;
  out.row.stopped = result.stopped;
  SuperArm truth_best = best_super_arm(env->mean_rewards(), dc);
  double loss = super_arm_value(env->mean_rewards(), truth_best) -
                super_arm_value(env->mean_rewards(), result.output);
  out.row.correct = result.output.size() > 0 && loss <= config.epsilon + 1e-12;
  out.row.wall_clock_total = result.algo_seconds;
  out.row.wall_clock_per_round_mean = result.mean_round_seconds();
  out.trace = std::move(result.trace);
  return out;
}

int thread_cap() {
  if (const char* env = std::getenv("BANDIT_CPE_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 4;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::counting_semaphore<256> slots(std::min(thread_cap(), 256));
  std::vector<std::future<SeedRun>> futures;
  futures.reserve(config.seeds.size());
  for (std::uint64_t seed : config.seeds) {
    futures.push_back(std::async(std::launch::async, [&, seed] {
      slots.acquire();
      try {
        SeedRun r = run_one_seed(config, seed);
        slots.release();
        return r;
      } catch (...) {
        slots.release();
        throw;
      }
    }));
  }

  std::vector<ResultRow> rows;
  for (std::size_t i = 0; i < futures.size(); ++i) {
    SeedRun run = futures[i].get();  // seed order regardless of scheduling
    if (!run.trace.empty() && config.trace_every > 0) {
      std::string name = "trace_" + config.algorithm + "_seed" +
                         std::to_string(config.seeds[i]) + ".csv";
      std::ofstream f(out_dir + "/" + name, std::ios::binary);
      f << "round,theta_best,margin,alpha_t,ratio,round_seconds\n";
      for (const TraceRow& t : run.trace)
        f << t.t << ',' << format_double(t.empirical_best_value) << ','
          << format_double(t.margin) << ',' << format_double(t.alpha_t) << ','
          << format_double(t.ratio) << ',' << format_double(t.round_seconds) << '\n';
      run.row.trace_file = name;
    }
    rows.push_back(run.row);
  }
  write_results_csv(rows, out_dir + "/results.csv");
  return rows;
}

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "seed,algorithm,n,k,delta_min,samples,correct,stopped,"
       "wall_clock_total,wall_clock_per_round_mean,trace_file\n";
  for (const ResultRow& r : rows) {
    f << r.seed << ',' << r.algorithm << ',' << r.n << ',' << r.k << ','
      << format_double(r.delta_min) << ',' << r.samples << ',' << (r.correct ? 1 : 0) << ','
      << (r.stopped ? 1 : 0) << ',' << format_double(r.wall_clock_total) << ','
      << format_double(r.wall_clock_per_round_mean) << ',' << r.trace_file << '\n';
  }
}

std::vector<BenchRow> bench_runtime(const std::vector<int>& n_values,
                                    const std::vector<std::string>& algorithms,
                                    long min_rounds) {
  std::vector<BenchRow> rows;
  for (int n : n_values) {
    if (n % 2 != 0) throw std::invalid_argument("bench_runtime: n values must be even");
    const int k = n / 2;
    InstanceSpec spec{n, k, 0.5, 1};
    DecisionClass dc = DecisionClass::top_k(n, k);

    for (const std::string& algo : algorithms) {
      if (std::find(kAlgorithms.begin(), kAlgorithms.end(), algo) == kAlgorithms.end())
        throw std::invalid_argument("bench_runtime: unknown algorithm '" + algo + "'");
      RunOptions options;
      options.force_budget = true;
      options.enumeration_budget = 1000000;
      if (algo == "exhaustive" &&
          binomial_capped(n, k, options.enumeration_budget) > options.enumeration_budget) {
        std::cerr << "bench: skipping exhaustive at n=" << n
                  << " (decision class exceeds the enumeration budget)\n";
        continue;
      }
      auto env = generate_synthetic(spec);
      Allocation p = uniform_allocation(cyclic_design(n, k).blocks);
      options.budget = static_cast<long>(p.support.size()) + n + min_rounds + 20;
      ConfidenceParams params;
      params.k = k;
      params.epsilon = 0.0;
      options.alpha_override = 0.9;

      RunResult result;
      if (algo == "saqm") {
        result = run_saqm(*env, dc, p, params, greedy_peeling_oracle(), options);
      } else if (algo == "safoa") {
        result = run_safoa(*env, dc, p, params, greedy_peeling_oracle(), options);
      } else if (algo == "icb") {
        result = run_icb(*env, dc, p, params, options);
      } else {
        result = run_exhaustive(*env, dc, p, params, options);
      }
      rows.push_back({algo, n, k, result.measured_rounds, result.mean_round_seconds()});
    }
  }
  return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "algorithm,n,k,rounds,seconds_per_round\n";
  for (const BenchRow& r : rows)
    f << r.algorithm << ',' << r.n << ',' << r.k << ',' << r.rounds << ','
      << format_double(r.seconds_per_round) << '\n';
}

std::vector<std::string> expand_glob(const std::string& pattern) {
  glob_t g;
  std::vector<std::string> out;
  if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  globfree(&g);
  return out;
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::vector<ResultRow> rows;
  bool header = true;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    while (fields.size() < 11) fields.emplace_back();
    ResultRow r;
    r.seed = std::stoull(fields[0]);
    r.algorithm = fields[1];
    r.n = std::stoi(fields[2]);
    r.k = std::stoi(fields[3]);
    r.delta_min = std::stod(fields[4]);
    r.samples = std::stol(fields[5]);
    r.correct = fields[6] == "1";
    r.stopped = fields[7] == "1";
    r.wall_clock_total = std::stod(fields[8]);
    r.wall_clock_per_round_mean = std::stod(fields[9]);
    r.trace_file = fields[10];
    rows.push_back(r);
  }
  return rows;
}

std::vector<AggregateRow> aggregate_results(const std::vector<ResultRow>& rows) {
  std::map<std::tuple<std::string, int, int, double>, std::vector<const ResultRow*>> groups;
  for (const ResultRow& r : rows)
    groups[{r.algorithm, r.n, r.k, r.delta_min}].push_back(&r);
  std::vector<AggregateRow> out;
  for (const auto& [key, members] : groups) {
    AggregateRow a;
    a.algorithm = std::get<0>(key);
    a.n = std::get<1>(key);
    a.k = std::get<2>(key);
    a.delta_min = std::get<3>(key);
    a.runs = static_cast<long>(members.size());
    double s = 0, s2 = 0, w = 0, w2 = 0, c = 0;
    for (const ResultRow* r : members) {
      s += r->samples;
      s2 += static_cast<double>(r->samples) * r->samples;
      w += r->wall_clock_total;
      w2 += r->wall_clock_total * r->wall_clock_total;
      c += r->correct ? 1 : 0;
    }
    const double m = static_cast<double>(a.runs);
    a.samples_mean = s / m;
    a.samples_stddev = std::sqrt(std::max(s2 / m - a.samples_mean * a.samples_mean, 0.0));
    a.seconds_mean = w / m;
    a.seconds_stddev = std::sqrt(std::max(w2 / m - a.seconds_mean * a.seconds_mean, 0.0));
    a.correct_rate = c / m;
    out.push_back(a);
  }
  return out;
}

void write_report(const std::vector<AggregateRow>& rows, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f(out_dir + "/aggregate.csv", std::ios::binary);
    f << "algorithm,n,k,delta_min,runs,samples_mean,samples_stddev,correct_rate,"
         "seconds_mean,seconds_stddev\n";
    for (const AggregateRow& a : rows)
      f << a.algorithm << ',' << a.n << ',' << a.k << ',' << format_double(a.delta_min) << ','
        << a.runs << ',' << format_double(a.samples_mean) << ','
        << format_double(a.samples_stddev) << ',' << format_double(a.correct_rate) << ','
        << format_double(a.seconds_mean) << ',' << format_double(a.seconds_stddev) << '\n';
  }
  {
    // gnuplot-friendly: x = delta_min, y = samples
    std::ofstream f(out_dir + "/samples_vs_delta_min.dat", std::ios::binary);
    f << "# algorithm delta_min samples_mean samples_stddev\n";
    for (const AggregateRow& a : rows)
      f << a.algorithm << ' ' << format_double(a.delta_min) << ' '
        << format_double(a.samples_mean) << ' ' << format_double(a.samples_stddev) << '\n';
  }
  {
    // x = n, y = seconds
    std::ofstream f(out_dir + "/seconds_vs_n.dat", std::ios::binary);
    f << "# algorithm n seconds_mean seconds_stddev\n";
    for (const AggregateRow& a : rows)
      f << a.algorithm << ' ' << a.n << ' ' << format_double(a.seconds_mean) << ' '
        << format_double(a.seconds_stddev) << '\n';
  }
}

void aggregate_ratio_traces(const std::vector<std::string>& trace_paths,
                            const std::string& out_path) {
  std::map<long, std::pair<double, long>> acc;  // round -> (sum ratio, count)
  for (const std::string& path : trace_paths) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::string line;
    bool header = true;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      if (header) {
        header = false;
        continue;
      }
      std::vector<std::string> fields;
      std::stringstream ss(line);
      std::string field;
      while (std::getline(ss, field, ',')) fields.push_back(field);
      if (fields.size() < 5) continue;
      long round = std::stol(fields[0]);
      double ratio = std::stod(fields[4]);
      acc[round].first += ratio;
      acc[round].second += 1;
    }
  }
  std::ofstream f(out_path, std::ios::binary);
  f << "round,mean_ratio,runs\n";
  for (const auto& [round, sum_count] : acc)
    f << round << ',' << format_double(sum_count.first / sum_count.second) << ','
      << sum_count.second << '\n';
}

}  // namespace cpex
