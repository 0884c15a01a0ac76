#ifndef CPEX_IDENTIFICATION_HPP_
#define CPEX_IDENTIFICATION_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "cpex/allocation.hpp"
#include "cpex/confidence.hpp"
#include "cpex/decision_class.hpp"
#include "cpex/dks.hpp"
#include "cpex/environment.hpp"

namespace cpex {

struct RunOptions {
  long budget = 10000000;
  long check_every = 1;   // stop-condition stride after full rank
  long trace_every = 0;   // 0: record only the final checkpoint
  bool force_budget = false;  // measurement mode: never stop, run to budget
  bool record_ratio = false;  // per-checkpoint CEM approximation ratio
  std::uint64_t seed = 0;     // internal randomness (SA-FOA candidate draws)
  std::optional<double> alpha_override;  // empirical QP ratio used in SAQM's stop
  int ell = 1;                           // SA-FOA draws ell*n candidates per round
  std::uint64_t enumeration_budget = 1000000;
};

struct TraceRow {
  long t = 0;
  double empirical_best_value = 0.0;  // theta_hat(M_hat*)
  double margin = 0.0;                // stop predicate slack; >= 0 means stop
  double alpha_t = 0.0;               // CEM ratio in use (SAQM only)
  double ratio = 0.0;                 // measured Z_t / (C_t max ||chi||), when recorded
  double round_seconds = 0.0;         // mean algorithm seconds per round so far
};

struct StoppingDiagnostics {
  SuperArm empirical_best;
  SuperArm challenger;
  double empirical_gap = 0.0;  // theta_hat(M_hat*) - theta_hat(challenger)
  double radius = 0.0;         // C_t at the last check
};

struct RunResult {
  SuperArm output;
  long samples = 0;
  bool stopped = false;
  std::vector<TraceRow> trace;
  StoppingDiagnostics diagnostics;
  double algo_seconds = 0.0;  // wall clock excluding environment sampling
  long measured_rounds = 0;

  double mean_round_seconds() const {
    return measured_rounds > 0 ? algo_seconds / measured_rounds : 0.0;
  }
};

// Static-allocation identification with approximate quadratic maximization:
// the ellipsoid stop condition tested through the DkS reduction, with
// alpha_t = sqrt(alpha_QP) certifying the approximate CEM value.
RunResult run_saqm(Environment& env, const DecisionClass& dc, const Allocation& p,
                   const ConfidenceParams& params, const DksOracle& oracle,
                   const RunOptions& options = {});

// First-order approximation of the gap confidence bound; stops once
// eps/2 >= Z'_t - theta_hat(M_hat*) over the sampled candidate set.
RunResult run_safoa(Environment& env, const DecisionClass& dc, const Allocation& p,
                    const ConfidenceParams& params, const DksOracle& oracle,
                    const RunOptions& options = {});

// Independent (diagonal) confidence bounds with the linear-maximization
// subproblem P1; polynomial for any linear-maximizable decision class.
RunResult run_icb(Environment& env, const DecisionClass& dc, const Allocation& p,
                  const ConfidenceParams& params, const RunOptions& options = {});

// Full enumeration of the gap bound; exact but exponential in k.
RunResult run_exhaustive(Environment& env, const DecisionClass& dc, const Allocation& p,
                         const ConfidenceParams& params, const RunOptions& options = {});

}  // namespace cpex

#endif  // CPEX_IDENTIFICATION_HPP_
