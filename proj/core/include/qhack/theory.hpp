#pragma once

#include "qhack/linalg.hpp"

// Closed-form asymptotics for Haar-averaged attack fidelities.  The average
// optimal fidelity at aspect ratio kappa = dB/dA is governed by the half
// moment of the Marchenko-Pastur law,
//
//   I_kappa = 2F1(1/2, -1/2; 2; min(kappa^2, kappa^-2)),
//
// with I_1 = 8/(3 pi).  Only the two hypergeometric families needed here are
// implemented: (1/2,-1/2;2;z) and the moment family (1-m,-m;2;z).

namespace qhack::theory {

using linalg::Index;

// Dimensions entering the averaged formulas; defaults mirror UnitaryNetwork.
struct DimensionProfile {
  Index dA = 0;
  Index dB = 0;
  Index dK = 0;  // 0 means dA
  Index dL = 0;  // 0 means dB
  Index d0 = 1;

  double kappa() const;  // dB/dA
};

// 2F1(1/2, -1/2; 2; z) for z in [0, 1], by power series (terms fall
// geometrically; converges at z = 1).  Value in (0.84, 1].
double hyp2f1_half(double z);

// 2F1(1-m, -m; 2; z), the closed form of the Marchenko-Pastur m-th moment.
double hyp2f1_moment(double m, double z);

// m-th moment of the Marchenko-Pastur density with ratio lambda in (0,1]:
//   integral over [lambda-, lambda+] of x^(m-1) sqrt((l+ - x)(x - l-))
//   / (2 pi lambda) dx,  lambda+- = (1 +- sqrt(lambda))^2,
// evaluated by tanh-sinh quadrature to absolute tolerance 1e-10.  Serves as
// the independent oracle for the hypergeometric closed forms.
double mp_moment_quadrature(double lambda, double m);

// Half moment at aspect ratio kappa (argument symmetrized) and its large-
// kappa expansion 1 - 1/(8 kappa^2).
double i_kappa(double kappa);
double i_kappa_approx(double kappa);

// Haar-averaged optimal hacking fidelity.  With q = dB*dL / (dA*dK) and
// I = i_kappa(sqrt(q)):
//   q >= 1:  I^2 + (1 - I^2)/(dA*dK)
//   q <  1:  q*I^2 + (1 - I^2)/(dA*dK)
// divided by d0^2 for a spectator of dimension d0.  The real-valued overload
// backs continuity checks across the q = 1 boundary.
double avg_p_opt(const DimensionProfile& profile);
double avg_p_opt_real(double dA, double dB, double dK, double dL, double d0);

}  // namespace qhack::theory
