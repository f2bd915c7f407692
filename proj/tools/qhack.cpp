// Command-line front end: evaluation, optimization, sweeps, theory values,
// verification suites, and the sender-side dual attack.
//
// Exit codes: 0 success, 1 invalid input or flags, 2 verification failure.
// The default seed is 0; QHACK_SEED overrides it whenever --seed is absent.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qhack/experiments.hpp"
#include "qhack/hacking.hpp"
#include "qhack/io.hpp"
#include "qhack/theory.hpp"

namespace {

using qhack::HackingReport;
using qhack::Index;
using qhack::OptimizerSettings;
using qhack::ProbeOperator;
using qhack::Strategy;
using qhack::UnitaryNetwork;
using qhack::linalg::CMatrix;

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::uint64_t resolve_seed(const CLI::Option* seedOpt, std::uint64_t seedFlag) {
  if (seedOpt->count() > 0) return seedFlag;
  if (const char* env = std::getenv("QHACK_SEED")) {
    const std::string text(env);
    std::size_t used = 0;
    unsigned long long value = 0;
    try {
      value = std::stoull(text, &used);
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != text.size())
      throw std::runtime_error("QHACK_SEED must be an unsigned integer, got: " + text);
    return static_cast<std::uint64_t>(value);
  }
  return 0;
}

void emit(const std::string& text, const std::string& outPath) {
  if (outPath.empty())
    std::cout << text;
  else
    qhack::io::write_text(outPath, text);
}

constexpr Index kSampleDimCap = 4096;

UnitaryNetwork sampled_network(Index dA, Index dB, Index d0, qhack::random::Rng& rng) {
  if (dA < 2 || dB < 2) throw std::runtime_error("d_a and d_b must be >= 2");
  if (d0 < 1) throw std::runtime_error("d_0 must be >= 1");
  const Index dim = dA * dB * d0;
  if (dim > kSampleDimCap)
    throw std::runtime_error("network dimension " + std::to_string(dim) +
                             " exceeds cap " + std::to_string(kSampleDimCap));
  return UnitaryNetwork::make(qhack::random::haar_unitary(dim, rng), dA, dB, 0, 0, d0);
}

struct EvalArgs {
  std::string unitaryPath;
  Index dA = 0, dB = 0, d0 = 1;
  std::uint64_t seed = 0;
  std::string strategyName;
  std::string outPath;
};

int run_eval(const EvalArgs& a, bool hasUnitary, bool hasDims) {
  if (hasUnitary == hasDims)
    throw std::runtime_error("eval: give either --unitary or --da/--db, not both");
  const auto strategy = qhack::strategy_from_name(a.strategyName);
  if (!strategy) throw std::runtime_error("eval: unknown strategy " + a.strategyName);

  qhack::random::Rng rng(a.seed, 0);
  const UnitaryNetwork net = hasUnitary ? qhack::io::load_network(a.unitaryPath)
                                        : sampled_network(a.dA, a.dB, a.d0, rng);
  const auto ch = qhack::hacking::rotated(net);
  HackingReport rep;
  switch (*strategy) {
    case Strategy::ME:
      rep = qhack::hacking::me_strategy(ch);
      break;
    case Strategy::PG:
      rep = qhack::hacking::pg_strategy(ch).report;
      break;
    case Strategy::OPT:
      rep = qhack::hacking::optimize_probe(ch, OptimizerSettings{}, rng);
      break;
    case Strategy::RAND: {
      const ProbeOperator probe = qhack::random::random_probe(ch.dB, rng);
      rep = qhack::hacking::optimal_recovery_for_probe(ch, probe);
      rep.strategy = Strategy::RAND;
      break;
    }
  }
  emit(qhack::io::hacking_report_json(rep, ch, a.seed), a.outPath);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attack evaluation for unitary quantum networks"};
  app.require_subcommand(1);

  // eval
  EvalArgs evalArgs;
  std::uint64_t evalSeedFlag = 0;
  auto* evalCmd = app.add_subcommand("eval", "evaluate one strategy on a network");
  auto* evalUnitary = evalCmd->add_option("--unitary", evalArgs.unitaryPath, "unitary JSON file");
  auto* evalDa = evalCmd->add_option("--da", evalArgs.dA, "sender dimension (samples a Haar network)");
  auto* evalDb = evalCmd->add_option("--db", evalArgs.dB, "attacker dimension");
  evalCmd->add_option("--d0", evalArgs.d0, "spectator dimension (sampled mode)");
  auto* evalSeed = evalCmd->add_option("--seed", evalSeedFlag, "RNG seed");
  evalCmd->add_option("--strategy", evalArgs.strategyName, "me|pg|opt|rand")->required();
  evalCmd->add_option("--out", evalArgs.outPath, "write JSON here instead of stdout");

  // optimize
  std::string optUnitaryPath, optOutPath;
  std::uint64_t optSeedFlag = 0;
  OptimizerSettings optSettings;
  auto* optCmd = app.add_subcommand("optimize", "probe ascent to the optimal strategy");
  optCmd->add_option("--unitary", optUnitaryPath, "unitary JSON file")->required();
  optCmd->add_option("--eps", optSettings.stepSize, "ascent step size");
  optCmd->add_option("--max-iter", optSettings.maxIter, "iteration cap");
  optCmd->add_option("--tol", optSettings.convergenceTol, "relative objective tolerance");
  optCmd->add_option("--restarts", optSettings.restarts, "extra random starts");
  auto* optSeed = optCmd->add_option("--seed", optSeedFlag, "RNG seed");
  optCmd->add_option("--out", optOutPath, "write JSON here instead of stdout");

  // sweep
  std::string sweepConfigPath, sweepOutPath;
  int sweepThreads = 1;
  bool sweepTimings = false;
  auto* sweepCmd = app.add_subcommand("sweep", "Monte Carlo strategy sweep");
  sweepCmd->add_option("--config", sweepConfigPath, "experiment config JSON")->required();
  sweepCmd->add_option("--out", sweepOutPath, "CSV path (aggregate goes to *_agg)");
  sweepCmd->add_option("--threads", sweepThreads, "worker threads; output invariant to it")
      ->check(CLI::PositiveNumber);
  sweepCmd->add_flag("--timings", sweepTimings,
                     "record measured wall_ms (off keeps output seed-deterministic)");

  // theory
  Index thDa = 0, thDb = 0, thD0 = 1;
  std::string thOutPath;
  auto* thCmd = app.add_subcommand("theory", "averaged closed-form values");
  thCmd->add_option("--da", thDa, "sender dimension")->required();
  thCmd->add_option("--db", thDb, "attacker dimension")->required();
  thCmd->add_option("--d0", thD0, "spectator dimension");
  thCmd->add_option("--out", thOutPath, "write JSON here instead of stdout");

  // verify
  std::string verifySuiteName, verifyOutPath;
  int verifyTrials = 20;
  std::uint64_t verifySeedFlag = 0;
  auto* verifyCmd = app.add_subcommand("verify", "run an invariant battery");
  verifyCmd->add_option("--suite", verifySuiteName, "bounds|duality|tradeoff|twoqubit|blackhole")
      ->required();
  verifyCmd->add_option("--trials", verifyTrials, "trials per case");
  auto* verifySeed = verifyCmd->add_option("--seed", verifySeedFlag, "RNG seed");
  verifyCmd->add_option("--out", verifyOutPath, "write JSON here instead of stdout");

  // hp
  std::string hpUnitaryPath, hpOutPath;
  std::uint64_t hpSeedFlag = 0;
  OptimizerSettings hpSettings;
  auto* hpCmd = app.add_subcommand("hp", "sender-side dual attack vs. receiver optimum");
  hpCmd->add_option("--unitary", hpUnitaryPath, "unitary JSON file")->required();
  hpCmd->add_option("--eps", hpSettings.stepSize, "ascent step size");
  hpCmd->add_option("--max-iter", hpSettings.maxIter, "iteration cap");
  hpCmd->add_option("--tol", hpSettings.convergenceTol, "relative objective tolerance");
  hpCmd->add_option("--restarts", hpSettings.restarts, "extra random starts");
  auto* hpSeed = hpCmd->add_option("--seed", hpSeedFlag, "RNG seed");
  hpCmd->add_option("--out", hpOutPath, "write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return 1;
  }

  try {
    if (evalCmd->parsed()) {
      evalArgs.seed = resolve_seed(evalSeed, evalSeedFlag);
      const bool hasDims = evalDa->count() > 0 || evalDb->count() > 0;
      if (hasDims && (evalDa->count() == 0 || evalDb->count() == 0))
        throw std::runtime_error("eval: --da and --db must be given together");
      return run_eval(evalArgs, evalUnitary->count() > 0, hasDims);
    }
    if (optCmd->parsed()) {
      const std::uint64_t seed = resolve_seed(optSeed, optSeedFlag);
      optSettings.validate();
      qhack::random::Rng rng(seed, 0);
      const UnitaryNetwork net = qhack::io::load_network(optUnitaryPath);
      const auto ch = qhack::hacking::rotated(net);
      std::vector<double> trace;
      const HackingReport rep = qhack::hacking::optimize_probe(ch, optSettings, rng, &trace);
      emit(qhack::io::hacking_report_json(rep, ch, seed, &trace), optOutPath);
      return 0;
    }
    if (sweepCmd->parsed()) {
      const auto cfg = qhack::io::load_experiment_config(sweepConfigPath);
      const auto result = qhack::experiments::run_sweep(cfg, sweepThreads);
      if (sweepOutPath.empty()) {
        std::cout << qhack::experiments::to_csv(result.rows, sweepTimings);
      } else {
        qhack::experiments::write_csv(result.rows, sweepOutPath, sweepTimings);
        qhack::experiments::write_aggregate_csv(
            result.aggregates, qhack::experiments::aggregate_path(sweepOutPath));
      }
      return 0;
    }
    if (thCmd->parsed()) {
      emit(qhack::io::theory_json(thDa, thDb, thD0), thOutPath);
      return 0;
    }
    if (verifyCmd->parsed()) {
      const std::uint64_t seed = resolve_seed(verifySeed, verifySeedFlag);
      const auto suite = qhack::experiments::suite_from_name(verifySuiteName);
      if (!suite) throw std::runtime_error("verify: unknown suite " + verifySuiteName);
      const auto report = qhack::experiments::run_verify(*suite, verifyTrials, seed);
      emit(qhack::experiments::verify_report_json(report), verifyOutPath);
      return report.passed ? 0 : 2;
    }
    if (hpCmd->parsed()) {
      const std::uint64_t seed = resolve_seed(hpSeed, hpSeedFlag);
      hpSettings.validate();
      qhack::random::Rng rng(seed, 0);
      const UnitaryNetwork net = qhack::io::load_network(hpUnitaryPath);
      const auto ch = qhack::hacking::rotated(net);
      const auto res = qhack::hacking::hp_optimal(ch, hpSettings, rng);
      emit(qhack::io::hp_json(res, ch, seed), hpOutPath);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand\n";
  return 1;
}
