#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cpex/allocation.hpp"
#include "cpex/dks.hpp"
#include "cpex/harness.hpp"

namespace {

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoi(tok));
  }
  return out;
}

std::vector<std::string> parse_str_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

std::string join_indices(const cpex::SuperArm& arm) {
  std::string s;
  for (int e : arm.indices()) {
    if (!s.empty()) s += ' ';
    s += std::to_string(e);
  }
  return s;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::vector<std::string>& seed_override, long budget_override,
            long trace_override) {
  std::ifstream f(config_path);
  if (!f) {
    std::cerr << "run: cannot open config " << config_path << "\n";
    return 2;
  }
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    std::cerr << "run: invalid JSON in " << config_path << ": " << e.what() << "\n";
    return 2;
  }
  cpex::ExperimentConfig config;
  try {
    config = cpex::parse_config(j);
    if (!seed_override.empty()) {
      config.seeds.clear();
      for (const std::string& s : seed_override) config.seeds.push_back(std::stoull(s));
    }
    if (budget_override > 0) config.budget = budget_override;
    if (trace_override >= 0) config.trace_every = trace_override;
  } catch (const std::exception& e) {
    std::cerr << "run: " << e.what() << "\n";
    return 2;
  }
  cpex::run_experiment(config, out_dir);
  std::cout << out_dir << "/results.csv\n";
  return 0;
}

int cmd_bench(const std::string& n_csv, const std::string& algos_csv,
              const std::string& out_path) {
  std::vector<int> ns = parse_int_list(n_csv);
  std::vector<std::string> algos = parse_str_list(algos_csv);
  std::vector<cpex::BenchRow> rows;
  try {
    rows = cpex::bench_runtime(ns, algos);
  } catch (const std::invalid_argument& e) {
    std::cerr << "bench: " << e.what() << "\n";
    return 2;
  }
  if (out_path.empty()) {
    std::cout << "algorithm,n,k,rounds,seconds_per_round\n";
    for (const auto& r : rows)
      std::cout << r.algorithm << ',' << r.n << ',' << r.k << ',' << r.rounds << ','
                << r.seconds_per_round << '\n';
  } else {
    cpex::write_bench_csv(rows, out_path);
  }
  return 0;
}

int cmd_report(const std::string& pattern, const std::string& out_dir) {
  std::vector<std::string> files = cpex::expand_glob(pattern);
  if (files.empty()) {
    std::cerr << "report: no files match " << pattern << "\n";
    return 1;
  }
  std::vector<cpex::ResultRow> rows;
  std::vector<std::string> traces;
  for (const std::string& path : files) {
    auto part = cpex::read_results_csv(path);
    std::filesystem::path dir = std::filesystem::path(path).parent_path();
    for (const auto& r : part) {
      if (!r.trace_file.empty()) {
        auto t = dir / r.trace_file;
        if (std::filesystem::exists(t)) traces.push_back(t.string());
      }
    }
    rows.insert(rows.end(), part.begin(), part.end());
  }
  cpex::write_report(cpex::aggregate_results(rows), out_dir);
  if (!traces.empty())
    cpex::aggregate_ratio_traces(traces, out_dir + "/ratio_curve.csv");
  std::cout << out_dir << "/aggregate.csv\n";
  return 0;
}

int cmd_dks(const std::string& edges_path, int k) {
  std::ifstream f(edges_path);
  if (!f) {
    std::cerr << "dks: cannot open " << edges_path << "\n";
    return 1;
  }
  std::vector<std::tuple<int, int, double>> edges;
  int n = 0;
  std::string line;
  long lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, w;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, w)) {
      std::cerr << "dks: " << edges_path << ":" << lineno << ": expected i,j,weight\n";
      return 1;
    }
    try {
      int i = std::stoi(a), j = std::stoi(b);
      double weight = std::stod(w);
      if (i < 0 || j < 0 || i == j) throw std::invalid_argument("bad endpoints");
      edges.emplace_back(i, j, weight);
      n = std::max({n, i + 1, j + 1});
    } catch (const std::exception&) {
      // tolerate a header row only on line 1
      if (lineno == 1) continue;
      std::cerr << "dks: " << edges_path << ":" << lineno << ": expected i,j,weight\n";
      return 1;
    }
  }
  if (n < k || k < 1) {
    std::cerr << "dks: need at least k=" << k << " vertices, graph has " << n << "\n";
    return 2;
  }
  cpex::WeightedGraph g;
  g.n = n;
  g.weights = Eigen::MatrixXd::Zero(n, n);
  for (auto& [i, j, w] : edges) {
    g.weights(i, j) += w;
    g.weights(j, i) += w;
  }
  cpex::SuperArm best = cpex::greedy_peeling(g, k);
  std::cout << "subset,value\n";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", g.induced_weight(best));
  std::cout << join_indices(best) << ',' << buf << '\n';
  return 0;
}

int cmd_galloc(int n, int k, const std::string& strategy, long t) {
  cpex::DecisionClass dc = cpex::DecisionClass::top_k(n, k);
  cpex::Allocation p;
  if (strategy == "uniform") {
    p = cpex::uniform_allocation(cpex::default_candidate_support(dc, 1));
  } else if (strategy == "cyclic") {
    p = cpex::uniform_allocation(cpex::cyclic_design(n, k).blocks);
  } else if (strategy == "g") {
    p = cpex::g_allocation(dc, cpex::default_candidate_support(dc, 1));
  } else {
    std::cerr << "galloc: unknown strategy " << strategy << "\n";
    return 2;
  }
  std::vector<long> counts = cpex::round_allocation(p, t);
  std::cout << "support,prob,count\n";
  char buf[40];
  for (std::size_t i = 0; i < p.support.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.probs(static_cast<int>(i)));
    std::cout << join_indices(p.support[i]) << ',' << buf << ',' << counts[i] << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"combinatorial pure exploration with full-bandit feedback"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  std::string config_path, run_out = "out";
  std::vector<std::string> seed_override;
  long budget_override = 0, trace_override = -1;
  run->add_option("--config", config_path, "JSON config file")->required();
  run->add_option("--out", run_out, "output directory");
  run->add_option("--seeds", seed_override, "override config seeds")->delimiter(',');
  run->add_option("--budget", budget_override, "override sample budget");
  run->add_option("--trace-every", trace_override, "override trace stride");

  auto* bench = app.add_subcommand("bench", "per-round runtime at k = n/2");
  std::string n_csv, algos_csv = "saqm,safoa,icb,exhaustive", bench_out;
  bench->add_option("--n", n_csv, "comma-separated even n values")->required();
  bench->add_option("--algos", algos_csv, "comma-separated algorithms");
  bench->add_option("--out", bench_out, "output CSV (default stdout)");

  auto* report = app.add_subcommand("report", "aggregate result CSVs");
  std::string pattern, report_out = "report";
  report->add_option("glob", pattern, "shell glob over results CSVs")->required();
  report->add_option("--out", report_out, "output directory");

  auto* dks = app.add_subcommand("dks", "greedy peeling on a CSV edge list");
  std::string edges_path;
  int dks_k = 2;
  dks->add_option("edges", edges_path, "CSV edge list i,j,weight")->required();
  dks->add_option("--k", dks_k, "subgraph size")->required();

  auto* galloc = app.add_subcommand("galloc", "print a sampling design as CSV");
  int g_n = 0, g_k = 0;
  long g_t = 0;
  std::string strategy = "g";
  galloc->add_option("--n", g_n)->required();
  galloc->add_option("--k", g_k)->required();
  galloc->add_option("--strategy", strategy, "uniform | g | cyclic");
  galloc->add_option("--t", g_t, "total budget to round")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed())
      return cmd_run(config_path, run_out, seed_override, budget_override, trace_override);
    if (bench->parsed()) return cmd_bench(n_csv, algos_csv, bench_out);
    if (report->parsed()) return cmd_report(pattern, report_out);
    if (dks->parsed()) return cmd_dks(edges_path, dks_k);
    return cmd_galloc(g_n, g_k, strategy, g_t);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
