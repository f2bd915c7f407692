#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qhack/linalg.hpp"

// Domain types for network-hacking evaluation.  A network is a unitary U
// acting on a sender register A (dim dA), a receiver register B (dim dB),
// and an optional spectator register of dimension d0 held by other users;
// outputs are partitioned as K (x) L with dK*dL = dA*dB.  The spectator
// factor is the trailing tensor slot.
//
// In the attack, A is extended by a reference A' and B by a probe reference
// B'; the attacker prepares |phi> on BB' with matrix chi (Frobenius norm 1)
// and applies a recovery R on BB' after the network has acted.

namespace qhack {

using linalg::BiPartition;
using linalg::CMatrix;
using linalg::Complex;
using linalg::CVector;
using linalg::Index;

struct UnitaryNetwork {
  CMatrix u;  // (dA*dB*d0)-dimensional unitary
  Index dA = 0;
  Index dB = 0;
  Index dK = 0;  // first output factor, defaults to dA
  Index dL = 0;  // second output factor, defaults to dB
  Index d0 = 1;  // spectator dimension

  // Validates dimension bookkeeping, finiteness, and unitarity
  // (||U^+ U - I||_2 <= tol).
  static UnitaryNetwork make(CMatrix u, Index dA, Index dB, Index dK = 0,
                             Index dL = 0, Index d0 = 1, double tol = 1e-10);
  Index dim() const { return dA * dB * d0; }
};

// The rotated channel V acting from the composite (K,A) input slots to the
// (L,B) output slots: V[(l,b),(k,a)] = M[(k,l),(a,b)] with M the spectator-
// averaged network.  For d0 = 1, ||uo||_2 = sqrt(dA*dB) exactly; for d0 > 1
// the spectator average M = Tr_0 U / d0 is sub-unitary and
// ||uo||_2 <= sqrt(dA*dB).
struct RotatedChannel {
  CMatrix uo;  // (dL*dB) x (dK*dA)
  Index dA = 0;
  Index dB = 0;
  Index dK = 0;
  Index dL = 0;
  Index d0 = 1;
};

// Probe preparation |phi>_BB' = sum_b |b>_B (x) chi|b>_B', with chi of shape
// dB' x dB and unit Frobenius norm so |phi> is normalized.
struct ProbeOperator {
  CMatrix chi;

  static ProbeOperator make(CMatrix chi, double tol = 1e-10);
};

// Recovery acting after the network: stored as the coisometry picking out
// the (dK*dA)-dimensional block that enters the fidelity, rows orthonormal.
// rFull optionally carries a full unitary completion on BB' whose rows at
// composite indices (k*dBp + a) reproduce the coisometry.
struct RecoveryMap {
  CMatrix r;  // (dK*dA) x (dL*dBp)
  std::optional<CMatrix> rFull;

  static RecoveryMap make(CMatrix r, double tol = 1e-8);
};

enum class Strategy { ME, PG, OPT, RAND };

const char* strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(const std::string& name);

struct OptimizerSettings {
  double stepSize = 0.2;
  int maxIter = 2000;
  double convergenceTol = 1e-10;
  double pinvRelTol = 1e-10;
  int restarts = 3;

  void validate() const;  // all fields must be positive (restarts >= 0)
};

// Outcome of evaluating or optimizing one attack strategy.
struct HackingReport {
  Strategy strategy = Strategy::ME;
  double pHack = 0.0;
  ProbeOperator chi;
  RecoveryMap recovery;
  int iterations = 0;
  double residual = 0.0;  // extremal-equation residual; 0 for closed forms
  bool converged = true;
};

// Mixture of probe preparations sum_i p_i |phi_i><phi_i| on BB'.
struct MixedProbe {
  std::vector<double> weights;     // positive, sum to 1 within 1e-12
  std::vector<CMatrix> operators;  // each unit Frobenius norm, common shape

  static MixedProbe make(std::vector<double> weights, std::vector<CMatrix> operators);
};

}  // namespace qhack
