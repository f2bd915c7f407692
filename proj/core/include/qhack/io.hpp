#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qhack/experiments.hpp"
#include "qhack/hacking.hpp"

// File formats and report serialization for the command-line tool.
//
// Unitary files are JSON documents with integer fields d_a, d_b (required)
// and d_k, d_l, d_0 (optional, defaulting to d_a, d_b, 1), plus re and im:
// row-major nested arrays holding the matrix entries.  Unitarity is checked
// to 1e-8 on load.  Every failure surfaces as a one-line diagnostic naming
// the violated invariant.

namespace qhack::io {

using linalg::CMatrix;
using linalg::Index;

UnitaryNetwork load_network(const std::string& path);
void save_network(const UnitaryNetwork& net, const std::string& path);

// Sweep configuration mirroring ExperimentConfig in snake_case:
//   d_a_list, kappa, d_0, trials, strategies (names), master_seed, dim_cap,
//   optimizer { step_size, max_iter, convergence_tol, pinv_rel_tol, restarts }.
// Unknown keys are rejected.
experiments::ExperimentConfig load_experiment_config(const std::string& path);

// Strategy report with dimensions, seed, probe and (when present) recovery
// matrices; objectiveTrace, when given, is embedded as the accepted-step
// objective values of the ascent.
std::string hacking_report_json(const HackingReport& report,
                                const RotatedChannel& ch, std::uint64_t seed,
                                const std::vector<double>* objectiveTrace = nullptr);

std::string theory_json(Index dA, Index dB, Index d0);

std::string hp_json(const hacking::HpResult& res, const RotatedChannel& ch,
                    std::uint64_t seed);

void write_text(const std::string& path, const std::string& content);

}  // namespace qhack::io
