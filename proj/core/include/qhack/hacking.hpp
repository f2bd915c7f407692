#pragma once

#include <utility>
#include <vector>

#include "qhack/random.hpp"
#include "qhack/types.hpp"

// Attack evaluation for unitary networks.  The attacker Eve holds B and a
// reference B', prepares |phi>_BB' with matrix chi, lets the network act,
// and applies a recovery R on BB'.  Success is the fidelity with the target
// in which Eve shares a maximally entangled pair with the sender on (K,A)
// slots; all evaluators work on the rotated channel V = uo via
//
//   p = |Tr[R (I (x) chi) V]|^2 / (dA^2 dK).
//
// For the symmetric partition dK = dA, dL = dB the denominator is dA^3.

namespace qhack::hacking {

using linalg::CMatrix;
using linalg::Complex;
using linalg::CVector;
using linalg::Index;
using random::Rng;

// Spectator-averaged, clockwise-rotated channel of a network.
RotatedChannel rotated(const UnitaryNetwork& net);

// (I_dL (x) chi) * uo without materializing the Kronecker factor; chi may be
// rectangular dBp x dB.
CMatrix apply_probe(const CMatrix& uo, const CMatrix& chi, Index dL);

// Fidelity of a fixed strategy (R, chi).
double p_hack_trace_form(const RotatedChannel& ch, const RecoveryMap& r,
                         const ProbeOperator& chi);

// Best recovery for a fixed probe: R from the polar decomposition of
// M = (I (x) chi) uo, giving p = ||M||_1^2 / (dA^2 dK).
HackingReport optimal_recovery_for_probe(const RotatedChannel& ch,
                                         const ProbeOperator& chi);

// Best probe for a fixed recovery: chi = Tr_1[R^+ uo^+] normalized, giving
// p = ||Tr_1[uo R]||_2^2 / (dA^2 dK).  Throws if the trace vanishes.
HackingReport optimal_probe_for_recovery(const RotatedChannel& ch,
                                         const RecoveryMap& r);

// Maximally entangled probe chi = I/sqrt(dB):
// p = ||uo||_1^2 / (dA^2 dK dB).  For d0 = 1 this is bounded below by
// 1/dA^2 (attainable by discarding and re-preparing).
double p_me(const RotatedChannel& ch);
HackingReport me_strategy(const RotatedChannel& ch);

// Pretty-good strategy: chi = Tr_1|uo^+| normalized with the canonical
// recovery R satisfying uo R = |uo^+|.  pHack holds the closed form
// ||Tr_1|uo^+| ||_2^2 / (dA^2 dK); pReopt re-optimizes the recovery at
// fixed chi and always satisfies p_me <= pHack <= pReopt <= p_opt.
struct PgResult {
  HackingReport report;
  double pReopt = 0.0;
};
PgResult pg_strategy(const RotatedChannel& ch);

// Iterative ascent over probes for the global optimum.  Each step moves chi
// along the extremal-equation direction Tr_1[|M^+|^-1 M uo^+] with step-size
// backtracking (objective never decreases on an accepted step), starting
// from the maximally entangled probe; settings.restarts further starts from
// random probes are taken and the best kept.  Once the objective change
// falls below convergenceTol the iterate is polished by exact best-response
// alternation, which keeps the objective monotone while contracting the
// extremal-equation defect.  The returned chi is canonicalized to PSD by its
// polar transform (the fidelity is invariant under left-unitary moves of
// chi), and residual holds the extremal-equation defect of the final
// iterate.  objectiveTrace, when given, receives the accepted-step objective
// values ||M||_1 of the winning ascent.
HackingReport optimize_probe(const RotatedChannel& ch, const OptimizerSettings& s,
                             Rng& rng, std::vector<double>* objectiveTrace = nullptr);

// Installed-state overlap check by explicit simulation on A (x) A' (x) B (x) B'.
// rFull is a unitary on BB'; chi may be rectangular dBp x dB.  Requires the
// symmetric partition (dK = dA, dL = dB), d0 = 1, and total dimension
// dA^2 * dB * dBp <= 65536.
struct SimulationResult {
  double fJoint = 0.0;  // overlap with both target pairs
  double fExt = 0.0;    // extraction fidelity, pair on (A, A')-slot images
  double fPost = 0.0;   // installation fidelity, pair left with the receiver
};
SimulationResult simulate_final_state(const UnitaryNetwork& net, const CMatrix& rFull,
                                      const ProbeOperator& chi);

// Embeds a recovery coisometry into a full unitary on BB' whose rows at
// composite indices k*dBp + a (k, a < dA) are the coisometry rows, as
// simulate_final_state expects.  For dA = dB = dBp this is the coisometry
// itself.
CMatrix embed_recovery(const RecoveryMap& r, Index dA, Index dB, Index dBp);

// Sender-side dual attack: the transposed network acts on entangled pair
// inputs and the sender applies a unitary W on its doubled dA^2 space.  The
// success probability is
//   p = ||T||_2^2 / (dA dB^2),  T = hp_contraction(ch, w),
// and equals the protocol fidelity against the entangled target at weight
// 1/sqrt(dB) for every W (the doubled-space factors of W enter in swapped
// order relative to the raw protocol state).  Requires the symmetric
// partition; dB < dA is allowed and evaluated by the same contraction.
double hp_fidelity(const RotatedChannel& ch, const CMatrix& w);

// The dB x dA matrix T = Tr-paired[uo W^T F], F the swap of the two dA-dim
// factors of the doubled sender space: the leading dB-dim row factor of
// uo W^T F is traced against the leading dA-dim column factor over their
// shared range.
CMatrix hp_contraction(const RotatedChannel& ch, const CMatrix& w);

// Pairing matrix of shape dA^2 x dB^2 with F[(a,a'),(b,b')] = [a=b'][a'=b]:
// the rectangular extension of the swap used by the duality seed map
// between recoveries and sender unitaries.  For dB >= dA, running it through
// trace_out_first reproduces hp_contraction padded with zero columns.
CMatrix hp_pairing(Index dA, Index dB);

struct HpResult {
  double pHp = 0.0;        // best sender-side fidelity found
  double pHackOpt = 0.0;   // receiver-side optimum
  double predicted = 0.0;  // pHackOpt / kappa^2, kappa = dB/dA
  CMatrix w;               // maximizing sender unitary
  int iterations = 0;
};

// Ascends over W directly (projected gradient with backtracking and
// restarts); independent of the receiver-side optimizer except for the
// reported comparison value.
double hp_maximize_w(const RotatedChannel& ch, const OptimizerSettings& s, Rng& rng,
                     CMatrix* wOut = nullptr, int* itersOut = nullptr);

// Convenience wrapper: receiver-side optimum via optimize_probe, sender-side
// optimum via hp_maximize_w seeded both randomly and through the duality map
// W = polar-unitary of (R_opt F^+)^T.
HpResult hp_optimal(const RotatedChannel& ch, const OptimizerSettings& s, Rng& rng);

// Mixture probe evaluation: p = sum_i p_i |Tr[R (I (x) chi_i) uo]|^2 / (dA^2 dK)
// plus the mixture's overlap with the maximally entangled probe,
// fProbe = sum_i p_i |Tr chi_i|^2 / dB.
struct MixedProbeValue {
  double fidelity = 0.0;
  double fProbe = 0.0;
};
MixedProbeValue mixed_probe_fidelity(const RotatedChannel& ch, const RecoveryMap& r,
                                     const MixedProbe& probe);

// Best recovery for a mixture probe by monotone minorize-maximize: iterate
// R <- polar_coisometry(sum_i p_i conj(c_i) M_i), c_i = Tr[R M_i].
struct MixedRecoveryResult {
  RecoveryMap recovery;
  double fidelity = 0.0;
  int iterations = 0;
};
MixedRecoveryResult optimize_recovery_for_mixed_probe(const RotatedChannel& ch,
                                                      const MixedProbe& probe,
                                                      int maxIter = 500,
                                                      double tol = 1e-12);

// Extraction/installation trade-off: for any state rho on AB and pure
// targets psiA, phiB,
//   sqrt(1 - FA) + sqrt(1 - FB) >= (2/3)(1 - FAB),
// with FA, FB the marginal fidelities and FAB the joint one.  Returns the
// three fidelities and the slack (lhs - rhs, >= 0 up to tolerance).
struct TradeoffResult {
  double fA = 0.0;
  double fB = 0.0;
  double fAB = 0.0;
  double slack = 0.0;
};
TradeoffResult check_tradeoff(const CMatrix& rho, const CVector& psiA,
                              const CVector& phiB);

}  // namespace qhack::hacking
