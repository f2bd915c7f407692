// Acceptance battery: twelve numbered checks, one printed line each, nonzero
// exit if any fails.  Tolerances are pinned here on purpose; do not widen
// them to make a line turn green.
//
// --expect-fail=N,M flips the exit logic to "the failing set must equal
// exactly {N,M}": lines that document real deviations keep printing FAIL,
// and a criterion that unexpectedly turns green is also an error, because
// it means the recorded analysis no longer describes the code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qhack/experiments.hpp"

using namespace qhack;
namespace qe = qhack::experiments;
using hacking::rotated;
using linalg::CMatrix;
using linalg::Index;
using random::Rng;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

qe::ExperimentConfig sweep_base() {
  qe::ExperimentConfig cfg;
  cfg.trials = 20;
  cfg.strategies = {Strategy::OPT};
  cfg.masterSeed = 0;
  // The ascent from the maximally entangled start sits on the optimal
  // plateau after a few steps at these sizes; restarts only add runtime.
  cfg.optimizer.restarts = 0;
  cfg.optimizer.convergenceTol = 1e-8;
  cfg.optimizer.maxIter = 300;
  return cfg;
}

double opt_mean(const qe::SweepResult& res, Index dA) {
  for (const auto& a : res.aggregates)
    if (a.dA == dA && a.strategy == Strategy::OPT) return a.mean;
  return -1.0;
}

double worst_suite_slack(const qe::VerifyReport& rep) {
  double w = 1e300;
  for (const auto& a : rep.assertions) w = std::min(w, a.worstSlack);
  return w;
}

OptimizerSettings tight_probe() {
  OptimizerSettings s;
  s.convergenceTol = 1e-13;
  s.maxIter = 6000;
  s.restarts = 4;
  return s;
}

CMatrix controlled_flip() {
  CMatrix u = CMatrix::Zero(6, 6);
  u(0, 0) = u(3, 3) = 1.0;
  u(1, 4) = u(4, 1) = 1.0;
  u(2, 5) = u(5, 2) = 1.0;
  return u;
}

// 1. Plateau of the averaged optimum at equal dimensions.
Outcome c1() {
  auto cfg = sweep_base();
  cfg.dAList = {2, 4, 8, 12, 16};
  const auto res = qe::run_sweep(cfg, 1);
  const double mean = opt_mean(res, 16);
  const double target = theory::avg_p_opt({16, 16});
  const double diff = std::abs(mean - target);
  return {diff <= 0.03,
          fmt("mean p_opt at dA=16 = %.4f, target %.4f, |diff| = %.4f <= 0.03", mean,
              target, diff)};
}

// 2. Aspect-ratio boost at dB = 2 dA.
Outcome c2() {
  auto cfg = sweep_base();
  cfg.dAList = {8};
  cfg.kappa = 2.0;
  const auto res = qe::run_sweep(cfg, 1);
  const double mean = opt_mean(res, 8);
  const double diff = std::abs(mean - 0.936);
  return {diff <= 0.02,
          fmt("mean p_opt at dA=8, dB=16 = %.4f vs 0.936, |diff| = %.4f <= 0.02", mean,
              diff)};
}

// 3. Spectator suppression follows the inverse-square law.
Outcome c3() {
  auto cfg = sweep_base();
  cfg.dAList = {8};
  cfg.d0 = 2;
  const auto res = qe::run_sweep(cfg, 1);
  const double mean = opt_mean(res, 8);
  const double target = theory::avg_p_opt({8, 8});
  const double diff = std::abs(4.0 * mean - target);
  return {diff <= 0.05,
          fmt("4 * mean p_opt(d0=2) = %.4f vs d0=1 value %.4f, |diff| = %.4f <= 0.05",
              4.0 * mean, target, diff)};
}

// 4. Strategy chain and the square bound on random networks.
Outcome c4() {
  const auto rep = qe::run_verify(qe::VerifySuite::Bounds, 50, 0);
  return {rep.passed, fmt("bounds suite over 50 streams, worst slack %.2e >= 0",
                          worst_suite_slack(rep))};
}

// 5. Two-qubit channels are exactly solvable by the maximally mixed probe.
Outcome c5() {
  const auto rep = qe::run_verify(qe::VerifySuite::TwoQubit, 100, 0);
  return {rep.passed, fmt("twoqubit suite over 100 streams, worst slack %.2e >= 0",
                          worst_suite_slack(rep))};
}

// 6. Sender-side/receiver-side duality, sender optimum found by direct
//    ascent over W with random starts only.  The ratio only holds where the
//    sender's doubled space covers every recovery on the hacked side
//    (dB <= dA); for dB > dA the induced recoveries live in one fixed
//    dA^2-dimensional support and fall strictly short, so this line
//    documents a real deviation.
Outcome c6() {
  OptimizerSettings sender = tight_probe();
  sender.restarts = 8;
  double worst = 0.0, worstCovered = 0.0;
  int streamBase = 0;
  for (Index dA : {2, 3}) {
    for (Index dB : {2, 3, 4}) {
      for (int t = 0; t < 10; ++t) {
        Rng rng(0, 600000 + streamBase * 64 + t);
        const auto ch =
            rotated(UnitaryNetwork::make(random::haar_unitary(dA * dB, rng), dA, dB));
        const double pOpt = hacking::optimize_probe(ch, tight_probe(), rng).pHack;
        const double pHp = hacking::hp_maximize_w(ch, sender, rng);
        const double kappa = double(dB) / double(dA);
        const double dev = std::abs(pHp - pOpt / (kappa * kappa));
        worst = std::max(worst, dev);
        if (dB <= dA) worstCovered = std::max(worstCovered, dev);
      }
      ++streamBase;
    }
  }
  return {worst <= 1e-6,
          fmt("60 networks, worst |p_hp - p_opt/kappa^2| = %.2e <= 1e-6 (dB <= dA "
              "half alone: %.2e)",
              worst, worstCovered)};
}

// 7. Extraction/installation trade-off on random states and simulated runs.
Outcome c7() {
  const auto rep = qe::run_verify(qe::VerifySuite::Tradeoff, 100000, 0);
  return {rep.passed, fmt("1e5 state triples + 200 simulations, worst slack %.2e >= 0",
                          worst_suite_slack(rep))};
}

// 8. Trace form against the explicit final-state simulation.
Outcome c8() {
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index d = 2 + (t % 2);
    Rng rng(0, 808000 + t);
    const auto net = UnitaryNetwork::make(random::haar_unitary(d * d, rng), d, d);
    const auto ch = rotated(net);
    const auto probe = random::random_probe(d, rng);
    const CMatrix rFull = random::haar_unitary(d * d, rng);
    const double traced = hacking::p_hack_trace_form(ch, RecoveryMap::make(rFull), probe);
    const double sim = hacking::simulate_final_state(net, rFull, probe).fJoint;
    worst = std::max(worst, std::abs(traced - sim));
  }
  return {worst <= 1e-10, fmt("100 random strategies, worst |diff| = %.2e <= 1e-10", worst)};
}

// 9. Series evaluation against quadrature and the pinned constants.
Outcome c9() {
  double worst = 0.0;
  for (double z : {1.0, 0.25, 0.0625})
    worst = std::max(worst,
                     std::abs(theory::hyp2f1_half(z) - theory::mp_moment_quadrature(z, 0.5)));
  const double iGap = std::abs(theory::i_kappa(1.0) - 0.848826);
  const bool approxExact = theory::i_kappa_approx(1.0) == 0.875;
  const bool pass = worst <= 1e-8 && iGap <= 1e-6 && approxExact;
  return {pass, fmt("series vs quadrature worst %.2e <= 1e-8, I_1 gap %.2e <= 1e-6, "
                    "approx(1) exact",
                    worst, iGap)};
}

// 10. Averaged trace-norm statistic at module dimension 2 against the
//     joint-large-dimension window.  The faithful value sits near 0.760
//     (thin exact-norm blocks), so this line documents a real gap.
Outcome c10() {
  const auto rep = qe::run_verify(qe::VerifySuite::BlackHole, 20, 0);
  return {rep.passed,
          fmt("mean statistic vs 0.72 +/- 0.03 window, slack %.2e (value near 0.760 "
              "at module dim 2)",
              worst_suite_slack(rep))};
}

// 11. Optimizer contract: monotone accepted steps, extremal residual at
//     convergence, and a strict win over the entangled baseline on the
//     controlled flip.
Outcome c11() {
  OptimizerSettings s = tight_probe();
  s.restarts = 2;
  // Near-ceiling draws flatten out and the slowest of these twenty runs
  // needs ~6600 accepted steps before the plateau test fires.
  s.maxIter = 12000;
  s.convergenceTol = 1e-12;
  double worstResidual = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Index dA = 2 + (t % 2), dB = 2 + ((t / 2) % 2);
    Rng rng(0, 811000 + t);
    const auto ch =
        rotated(UnitaryNetwork::make(random::haar_unitary(dA * dB, rng), dA, dB));
    std::vector<double> trace;
    const auto rep = hacking::optimize_probe(ch, s, rng, &trace);
    for (std::size_t i = 1; i < trace.size(); ++i)
      if (trace[i] < trace[i - 1] - 1e-15)
        return {false, "objective decreased on an accepted step"};
    if (!rep.converged) return {false, "optimizer failed to converge"};
    worstResidual = std::max(worstResidual, rep.residual);
  }
  if (worstResidual > 1e-6)
    return {false, fmt("worst converged residual %.2e > 1e-6", worstResidual)};

  const auto ch = rotated(UnitaryNetwork::make(controlled_flip(), 2, 3));
  Rng rng(0, 812000);
  OptimizerSettings cs = tight_probe();
  const double me = hacking::p_me(ch);
  const double opt = hacking::optimize_probe(ch, cs, rng).pHack;
  if (!(opt > me + 1e-6))
    return {false, fmt("controlled flip: p_opt %.6f fails to beat p_me %.6f", opt, me)};
  return {true, fmt("20 monotone runs, worst residual %.2e <= 1e-6; controlled flip "
                    "p_opt - p_me = %.4f > 0",
                    worstResidual, opt - me)};
}

// 12. Bytewise identical sweep output across thread counts.
Outcome c12() {
  qe::ExperimentConfig cfg;
  cfg.dAList = {2, 3, 4};
  cfg.trials = 5;
  cfg.masterSeed = 0;
  cfg.optimizer.maxIter = 300;
  cfg.optimizer.convergenceTol = 1e-9;
  cfg.optimizer.restarts = 1;
  const auto one = qe::run_sweep(cfg, 1);
  const auto eight = qe::run_sweep(cfg, 8);
  const bool rowsMatch = qe::to_csv(one.rows) == qe::to_csv(eight.rows);
  const bool aggMatch =
      qe::to_aggregate_csv(one.aggregates) == qe::to_aggregate_csv(eight.aggregates);
  return {rowsMatch && aggMatch,
          std::string("rows ") + (rowsMatch ? "identical" : "DIFFER") + ", aggregates " +
              (aggMatch ? "identical" : "DIFFER") + " across 1 vs 8 threads"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expectFail;
  bool haveExpectation = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    const std::string prefix = "--expect-fail=";
    if (arg.rfind(prefix, 0) != 0) {
      std::fprintf(stderr, "usage: acceptance [--expect-fail=N,M,...]\n");
      return 2;
    }
    haveExpectation = true;
    std::stringstream list(arg.substr(prefix.size()));
    for (std::string tok; std::getline(list, tok, ',');) {
      const int n = std::atoi(tok.c_str());
      if (n < 1 || n > 12) {
        std::fprintf(stderr, "acceptance: criterion out of range: %s\n", tok.c_str());
        return 2;
      }
      expectFail.insert(n);
    }
  }

  struct Entry {
    const char* label;
    Outcome (*fn)();
  };
  const std::vector<Entry> entries = {
      {"plateau of mean p_opt at equal dimensions", c1},
      {"aspect-ratio 2 lift of mean p_opt", c2},
      {"spectator inverse-square suppression", c3},
      {"strategy chain and square bound", c4},
      {"two-qubit exact solution", c5},
      {"sender/receiver duality by brute force", c6},
      {"extraction/installation trade-off", c7},
      {"trace form vs full-state simulation", c8},
      {"half-moment series vs quadrature", c9},
      {"thin-module averaged statistic window", c10},
      {"optimizer monotonicity, residual, strict win", c11},
      {"thread-count invariant sweep bytes", c12},
  };

  std::set<int> failed;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    const Outcome out = entries[i].fn();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) failed.insert(static_cast<int>(i) + 1);
    std::printf("[%s] criterion %2zu: %s -- %s (%.1fs)\n", out.pass ? "PASS" : "FAIL",
                i + 1, entries[i].label, out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/12 criteria passed\n", 12 - static_cast<int>(failed.size()));
  if (!haveExpectation) return failed.empty() ? 0 : 1;

  std::string want, got;
  for (int n : expectFail) want += (want.empty() ? "" : ",") + std::to_string(n);
  for (int n : failed) got += (got.empty() ? "" : ",") + std::to_string(n);
  if (failed == expectFail) {
    std::printf("failing set {%s} matches the documented deviations\n", got.c_str());
    return 0;
  }
  std::printf("failing set {%s} deviates from the documented set {%s}\n", got.c_str(),
              want.c_str());
  return 1;
}
