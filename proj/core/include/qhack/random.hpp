#pragma once

#include <cstdint>
#include <random>

#include "qhack/types.hpp"

// Seeded sampling of Haar unitaries, probe operators, and random states.
//
// Reproducibility: a generator is addressed by (masterSeed, streamId) and the
// resulting sample sequence depends on nothing else.  Gaussian variates are
// produced by an explicit Box-Muller transform on top of std::mt19937_64
// (whose output sequence is fixed by the standard), so streams are identical
// across platforms; std::normal_distribution is deliberately avoided because
// its variate algorithm is implementation-defined.

namespace qhack::random {

using linalg::CMatrix;
using linalg::Complex;
using linalg::CVector;
using linalg::Index;

class Rng {
 public:
  // Parallel runs derive one stream per work item, streamId = item index.
  explicit Rng(std::uint64_t masterSeed, std::uint64_t streamId = 0);

  std::uint64_t next_u64();
  double uniform();  // [0, 1)
  double gauss();    // standard normal
  Complex gauss_complex();  // E z = 0, E|z|^2 = 1

 private:
  std::mt19937_64 engine_;
  bool hasSpare_ = false;
  double spare_ = 0.0;
};

// Ginibre matrix with iid gauss_complex() entries, sampled row-major.
CMatrix ginibre(Index rows, Index cols, Rng& rng);

// Haar-distributed n x n unitary: QR of a Ginibre matrix with column phases
// fixed by the phases of the triangular factor's diagonal.
CMatrix haar_unitary(Index n, Rng& rng);

// Probe chi = G/||G||_2 with G Ginibre dB x dB; the induced |phi>_BB' is a
// Haar-random pure state on the dB^2-dimensional doubled space.
ProbeOperator random_probe(Index dB, Rng& rng);

struct DensityAndPure {
  CMatrix rho;   // (dA*dB)-dimensional density matrix, Gaussian square root
  CVector psiA;  // Haar-random unit vector, dim dA
  CVector phiB;  // Haar-random unit vector, dim dB
};

// Random test triple for fidelity trade-off checks: rho = G G^+ / Tr[G G^+]
// with G Ginibre on the composite space, plus independent pure states.
DensityAndPure random_density_and_pure(Index dA, Index dB, Rng& rng);

}  // namespace qhack::random
