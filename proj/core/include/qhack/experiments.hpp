#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qhack/hacking.hpp"
#include "qhack/theory.hpp"

// Monte Carlo harness: strategy sweeps over Haar networks with deterministic
// parallel execution, plus the named verification suites.
//
// Reproducibility contract: every output row is a pure function of
// (masterSeed, config); thread count and scheduling never change results.
// Each (dA, trial) cell derives its own generator with streamId = trial and
// evaluates its strategies in the fixed order ME, PG, OPT, RAND.

namespace qhack::experiments {

using linalg::Index;

struct ExperimentConfig {
  std::vector<Index> dAList;
  double kappa = 1.0;  // dB = kappa * dA, must be integral for every dA
  Index d0 = 1;
  int trials = 20;
  std::vector<Strategy> strategies = {Strategy::ME, Strategy::PG, Strategy::OPT,
                                      Strategy::RAND};
  std::uint64_t masterSeed = 0;
  OptimizerSettings optimizer;
  Index dimCap = 4096;  // largest permitted network dimension dA*dB*d0

  void validate() const;
  Index dB_for(Index dA) const;
};

struct SweepRow {
  Index dA = 0;
  Index dB = 0;
  Index d0 = 1;
  double kappa = 1.0;
  int trial = 0;
  Strategy strategy = Strategy::ME;
  double pHack = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double wallMillis = 0.0;  // measured; excluded from serialization by default
};

struct AggregateRow {
  Index dA = 0;
  Index dB = 0;
  Index d0 = 1;
  double kappa = 1.0;
  Strategy strategy = Strategy::ME;
  double mean = 0.0;
  double stdErr = 0.0;  // sample std / sqrt(trials)
  double theory = 0.0;  // avg_p_opt at these dimensions
};

struct SweepResult {
  std::vector<SweepRow> rows;        // sorted by (dA, trial, strategy)
  std::vector<AggregateRow> aggregates;
};

SweepResult run_sweep(const ExperimentConfig& config, int threads = 1);

// Recomputes per-(dA, strategy) aggregates from trial rows; run_sweep uses
// exactly this, so re-aggregation reproduces its output bit for bit.
std::vector<AggregateRow> aggregate_rows(const std::vector<SweepRow>& rows);

// CSV rendering with the fixed headers
//   d_a,d_b,d_0,kappa,trial,strategy,p_hack,iterations,residual,wall_ms
//   d_a,d_b,d_0,kappa,strategy,mean,std_err,theory
// and floats at 17 significant digits.  wall_ms is written as 0 unless
// includeTimings is set, keeping default output a pure function of
// (masterSeed, config).
std::string to_csv(const std::vector<SweepRow>& rows, bool includeTimings = false);
std::string to_aggregate_csv(const std::vector<AggregateRow>& rows);
void write_csv(const std::vector<SweepRow>& rows, const std::string& path,
               bool includeTimings = false);
void write_aggregate_csv(const std::vector<AggregateRow>& rows, const std::string& path);

// "sweep.csv" -> "sweep_agg.csv"; no-extension paths get "_agg" appended.
std::string aggregate_path(const std::string& csvPath);

enum class VerifySuite { Bounds, Duality, Tradeoff, TwoQubit, BlackHole };
std::optional<VerifySuite> suite_from_name(const std::string& name);
const char* suite_name(VerifySuite suite);

struct VerifyAssertion {
  std::string name;
  int checks = 0;
  bool passed = true;
  double worstSlack = 0.0;              // most adverse margin seen (>= 0 passes)
  std::uint64_t counterexampleStream = 0;  // stream id of the worst case
};

struct VerifyReport {
  VerifySuite suite = VerifySuite::Bounds;
  int trials = 0;
  std::uint64_t seed = 0;
  bool passed = true;
  std::vector<VerifyAssertion> assertions;
};

// Invariant batteries:
//   bounds:    p_me <= pPG <= pPG_reopt <= p_opt chains, the 1/dA^2 floor,
//              and 1 - p_me <= 4(1 - p_opt), per trial at dA = dB in {2,3,4}
//   duality:   |p_HP - p_opt/kappa^2| <= 1e-8 at dA in {2,3}, dB in {2,3,4},
//              plus the same check restricted to dB <= dA and a >= 0.01 gap
//              check on dB > dA.  The blanket assertion fails by design: the
//              sender's doubled space only reaches recoveries supported on a
//              fixed dA^2-dim subspace, so for dB > dA its optimum falls
//              strictly short of p_opt/kappa^2 and the suite reports that.
//   tradeoff:  slack >= -1e-12 on `trials` random state triples and 200
//              simulated strategies
//   twoqubit:  Tr_1|uo^+| proportional to I within 1e-10; optimizer probe
//              equals I/sqrt(2) within 1e-6 with residual <= 1e-6
//   blackhole: mean ||uo||_1^2 / D^2 within 0.72 +- 0.03 at dM=2, DB=64
VerifyReport run_verify(VerifySuite suite, int trials, std::uint64_t seed);

std::string verify_report_json(const VerifyReport& report);
void write_verify_json(const VerifyReport& report, const std::string& path);

}  // namespace qhack::experiments
