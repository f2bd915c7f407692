#include "qhack/hacking.hpp"

#include <cmath>
#include <stdexcept>

namespace qhack {

using linalg::BiPartition;
using linalg::Keep;

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

UnitaryNetwork UnitaryNetwork::make(CMatrix u, Index dA, Index dB, Index dK, Index dL,
                                    Index d0, double tol) {
  if (dK <= 0) dK = dA;
  if (dL <= 0) dL = dB;
  require(dA >= 1 && dB >= 1 && d0 >= 1, "UnitaryNetwork: dimensions must be >= 1");
  require(dK * dL == dA * dB,
          "UnitaryNetwork: output partition dK*dL must equal dA*dB");
  const Index n = dA * dB * d0;
  require(u.rows() == n && u.cols() == n,
          "UnitaryNetwork: matrix dimension does not match dA*dB*d0");
  require(u.allFinite(), "UnitaryNetwork: matrix has non-finite entries");
  const double defect = (u.adjoint() * u - CMatrix::Identity(n, n)).norm();
  if (defect > tol)
    throw std::invalid_argument("UnitaryNetwork: matrix is not unitary (defect " +
                                std::to_string(defect) + ")");
  UnitaryNetwork net;
  net.u = std::move(u);
  net.dA = dA;
  net.dB = dB;
  net.dK = dK;
  net.dL = dL;
  net.d0 = d0;
  return net;
}

ProbeOperator ProbeOperator::make(CMatrix chi, double tol) {
  require(chi.rows() >= 1 && chi.cols() >= 1, "ProbeOperator: empty matrix");
  require(chi.allFinite(), "ProbeOperator: matrix has non-finite entries");
  const double n = chi.norm();
  if (std::abs(n - 1.0) > tol)
    throw std::invalid_argument(
        "ProbeOperator: Frobenius norm must be 1, got " + std::to_string(n));
  ProbeOperator p;
  p.chi = std::move(chi);
  return p;
}

RecoveryMap RecoveryMap::make(CMatrix r, double tol) {
  require(r.rows() >= 1 && r.cols() >= r.rows(),
          "RecoveryMap: coisometry needs cols >= rows");
  const CMatrix gram = r * r.adjoint();
  const double defect = (gram - CMatrix::Identity(r.rows(), r.rows())).norm();
  if (defect > tol)
    throw std::invalid_argument("RecoveryMap: rows not orthonormal (defect " +
                                std::to_string(defect) + ")");
  RecoveryMap m;
  m.r = std::move(r);
  return m;
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::ME: return "ME";
    case Strategy::PG: return "PG";
    case Strategy::OPT: return "OPT";
    case Strategy::RAND: return "RAND";
  }
  return "?";
}

std::optional<Strategy> strategy_from_name(const std::string& name) {
  if (name == "ME" || name == "me") return Strategy::ME;
  if (name == "PG" || name == "pg") return Strategy::PG;
  if (name == "OPT" || name == "opt") return Strategy::OPT;
  if (name == "RAND" || name == "rand") return Strategy::RAND;
  return std::nullopt;
}

void OptimizerSettings::validate() const {
  if (!(stepSize > 0.0) || maxIter < 1 || !(convergenceTol > 0.0) ||
      !(pinvRelTol > 0.0) || restarts < 0)
    throw std::invalid_argument("OptimizerSettings: fields must be positive");
}

MixedProbe MixedProbe::make(std::vector<double> weights, std::vector<CMatrix> operators) {
  require(!weights.empty() && weights.size() == operators.size(),
          "MixedProbe: need matching, non-empty weights and operators");
  double sum = 0.0;
  for (double w : weights) {
    require(w > 0.0, "MixedProbe: weights must be positive");
    sum += w;
  }
  require(std::abs(sum - 1.0) <= 1e-12, "MixedProbe: weights must sum to 1");
  for (const CMatrix& op : operators) {
    require(op.rows() == operators.front().rows() && op.cols() == operators.front().cols(),
            "MixedProbe: operators must share one shape");
    require(std::abs(op.norm() - 1.0) <= 1e-10,
            "MixedProbe: each operator needs unit Frobenius norm");
  }
  MixedProbe p;
  p.weights = std::move(weights);
  p.operators = std::move(operators);
  return p;
}

}  // namespace qhack

namespace qhack::hacking {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double denom(const RotatedChannel& ch) {
  return static_cast<double>(ch.dA) * ch.dA * ch.dK;
}

}  // namespace

// (I_dL (x) chi) * uo without materializing the Kronecker factor.
CMatrix apply_probe(const CMatrix& uo, const CMatrix& chi, Index dL) {
  const Index dB = chi.cols(), dBp = chi.rows();
  require(uo.rows() == dL * dB, "apply_probe: probe shape incompatible with channel");
  CMatrix out(dL * dBp, uo.cols());
  for (Index l = 0; l < dL; ++l)
    out.middleRows(l * dBp, dBp).noalias() = chi * uo.middleRows(l * dB, dB);
  return out;
}

// Tr[a * b] for a m x n, b n x m.
static Complex trace_product(const CMatrix& a, const CMatrix& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

RotatedChannel rotated(const UnitaryNetwork& net) {
  const Index d = net.dA * net.dB;
  CMatrix reduced;
  if (net.d0 == 1) {
    reduced = net.u;
  } else {
    reduced = linalg::partial_trace(net.u, BiPartition{d, net.d0}, Keep::First) /
              static_cast<double>(net.d0);
  }
  RotatedChannel ch;
  ch.uo = linalg::rotate_clockwise(reduced, BiPartition{net.dK, net.dL},
                                  BiPartition{net.dA, net.dB});
  ch.dA = net.dA;
  ch.dB = net.dB;
  ch.dK = net.dK;
  ch.dL = net.dL;
  ch.d0 = net.d0;
  return ch;
}

double p_hack_trace_form(const RotatedChannel& ch, const RecoveryMap& r,
                         const ProbeOperator& chi) {
  require(chi.chi.cols() == ch.dB, "p_hack_trace_form: probe acts on the wrong space");
  const CMatrix m = apply_probe(ch.uo, chi.chi, ch.dL);
  require(r.r.rows() == ch.dK * ch.dA && r.r.cols() == m.rows(),
          "p_hack_trace_form: recovery shape incompatible");
  const double t = std::abs(trace_product(r.r, m));
  return t * t / denom(ch);
}

HackingReport optimal_recovery_for_probe(const RotatedChannel& ch,
                                         const ProbeOperator& chi) {
  require(chi.chi.cols() == ch.dB,
          "optimal_recovery_for_probe: probe acts on the wrong space");
  const CMatrix m = apply_probe(ch.uo, chi.chi, ch.dL);
  const linalg::SvdFactors f = linalg::svd(m);
  const double nuc = f.singulars.sum();
  HackingReport rep;
  rep.pHack = nuc * nuc / denom(ch);
  rep.chi = chi;
  // A coisometry B'B -> KA needs dL*dBp >= dK*dA; otherwise only the value
  // (the norm bound) is meaningful and no recovery is attached.
  if (m.rows() >= m.cols()) rep.recovery.r = f.rightAdj.adjoint() * f.left.adjoint();
  return rep;
}

HackingReport optimal_probe_for_recovery(const RotatedChannel& ch,
                                         const RecoveryMap& r) {
  require(r.r.rows() == ch.dK * ch.dA && r.r.cols() % ch.dL == 0,
          "optimal_probe_for_recovery: recovery shape incompatible");
  const CMatrix t = linalg::trace_out_first(ch.uo * r.r, ch.dL);
  const double n = t.norm();
  if (!(n > 1e-300))
    throw std::runtime_error(
        "optimal_probe_for_recovery: traced channel vanishes, probe undefined");
  HackingReport rep;
  rep.pHack = n * n / denom(ch);
  rep.chi = ProbeOperator::make(t.adjoint() / n);
  rep.recovery = r;
  return rep;
}

double p_me(const RotatedChannel& ch) {
  const double nuc = linalg::schatten_norm(ch.uo, 1.0);
  return nuc * nuc / (denom(ch) * ch.dB);
}

HackingReport me_strategy(const RotatedChannel& ch) {
  HackingReport rep;
  rep.strategy = Strategy::ME;
  rep.chi = ProbeOperator::make(CMatrix::Identity(ch.dB, ch.dB) /
                                std::sqrt(static_cast<double>(ch.dB)));
  const linalg::SvdFactors f = linalg::svd(ch.uo);
  const double nuc = f.singulars.sum();
  rep.pHack = nuc * nuc / (denom(ch) * ch.dB);
  if (ch.uo.rows() >= ch.uo.cols())
    rep.recovery.r = f.rightAdj.adjoint() * f.left.adjoint();
  return rep;
}

PgResult pg_strategy(const RotatedChannel& ch) {
  const linalg::SvdFactors f = linalg::svd(ch.uo);
  const CMatrix absL = f.left * f.singulars.asDiagonal() * f.left.adjoint();
  const CMatrix t = linalg::trace_out_first(absL, ch.dL);
  const double n = t.norm();
  require(n > 1e-300, "pg_strategy: traced polar factor vanishes");
  PgResult out;
  out.report.strategy = Strategy::PG;
  out.report.pHack = n * n / denom(ch);
  out.report.chi = ProbeOperator::make(t / n);
  if (ch.uo.rows() >= ch.uo.cols())
    out.report.recovery.r = f.rightAdj.adjoint() * f.left.adjoint();
  out.pReopt = 0.0;
  {
    const CMatrix m = apply_probe(ch.uo, out.report.chi.chi, ch.dL);
    const double nuc = linalg::schatten_norm(m, 1.0);
    out.pReopt = nuc * nuc / denom(ch);
  }
  return out;
}

CMatrix embed_recovery(const RecoveryMap& r, Index dA, Index dB, Index dBp) {
  require(r.r.rows() == dA * dA && r.r.cols() == dB * dBp,
          "embed_recovery: coisometry shape incompatible with target spaces");
  const CMatrix full = linalg::complete_to_unitary(r.r);
  const Index n = dB * dBp;
  // Rows k*dBp + a (k, a < dA) carry the coisometry; the completion rows
  // fill the remaining indices in order.
  std::vector<Index> target(dA * dA);
  std::vector<bool> taken(n, false);
  for (Index k = 0; k < dA; ++k)
    for (Index a = 0; a < dA; ++a) {
      const Index t = k * dBp + a;
      target[k * dA + a] = t;
      taken[t] = true;
    }
  CMatrix out(n, n);
  for (Index i = 0; i < dA * dA; ++i) out.row(target[i]) = full.row(i);
  Index next = dA * dA;
  for (Index i = 0; i < n; ++i)
    if (!taken[i]) out.row(i) = full.row(next++);
  return out;
}

SimulationResult simulate_final_state(const UnitaryNetwork& net, const CMatrix& rFull,
                                      const ProbeOperator& chi) {
  require(net.d0 == 1, "simulate_final_state: spectator dimension must be 1");
  require(net.dK == net.dA && net.dL == net.dB,
          "simulate_final_state: symmetric output partition required");
  const Index dA = net.dA, dB = net.dB;
  const Index dBp = chi.chi.rows();
  require(chi.chi.cols() == dB, "simulate_final_state: probe acts on the wrong space");
  require(rFull.rows() == dB * dBp && rFull.cols() == dB * dBp,
          "simulate_final_state: recovery must be unitary on B (x) B'");
  require((rFull.adjoint() * rFull - CMatrix::Identity(dB * dBp, dB * dBp)).norm() <=
              1e-8,
          "simulate_final_state: recovery is not unitary");
  require(dA * dA * dB * dBp <= 65536,
          "simulate_final_state: total dimension exceeds 65536");

  // State on A (x) A' (x) B (x) B', rows (a,a'), cols (b,b').
  const double sdA = std::sqrt(static_cast<double>(dA));
  CMatrix psi1 = CMatrix::Zero(dA * dA, dB * dBp);
  for (Index k = 0; k < dA; ++k)
    for (Index ap = 0; ap < dA; ++ap)
      for (Index l = 0; l < dB; ++l)
        for (Index jp = 0; jp < dBp; ++jp) {
          Complex acc = 0.0;
          for (Index b = 0; b < dB; ++b)
            acc += net.u(k * dB + l, ap * dB + b) * chi.chi(jp, b);
          psi1(k * dA + ap, l * dBp + jp) = acc / sdA;
        }
  const CMatrix psi2 = psi1 * rFull.transpose();

  const Index dPrime = std::min(dA, dB);    // AB target rank
  const Index dPrime2 = std::min(dA, dBp);  // A'B' target rank
  SimulationResult res;

  Complex joint = 0.0;
  for (Index c = 0; c < dPrime; ++c)
    for (Index e = 0; e < dPrime2; ++e) joint += psi2(c * dA + e, c * dBp + e);
  joint /= std::sqrt(static_cast<double>(dPrime) * dPrime2);
  res.fJoint = std::norm(joint);

  double ext = 0.0;  // target pair on (A', B'), reduce over (A, B)
  for (Index a = 0; a < dA; ++a)
    for (Index m = 0; m < dB; ++m) {
      Complex acc = 0.0;
      for (Index c = 0; c < dPrime2; ++c) acc += psi2(a * dA + c, m * dBp + c);
      ext += std::norm(acc);
    }
  res.fExt = ext / dPrime2;

  double post = 0.0;  // target pair on (A, B), reduce over (A', B')
  for (Index ap = 0; ap < dA; ++ap)
    for (Index mp = 0; mp < dBp; ++mp) {
      Complex acc = 0.0;
      for (Index c = 0; c < dPrime; ++c) acc += psi2(c * dA + ap, c * dBp + mp);
      post += std::norm(acc);
    }
  res.fPost = post / dPrime;

  return res;
}

CMatrix hp_pairing(Index dA, Index dB) {
  require(dA >= 1 && dB >= 1, "hp_pairing: dimensions must be positive");
  CMatrix f = CMatrix::Zero(dA * dA, dB * dB);
  for (Index a = 0; a < dA; ++a)
    for (Index ap = 0; ap < dA; ++ap)
      if (ap < dB && a < dB) f(a * dA + ap, ap * dB + a) = 1.0;
  return f;
}

CMatrix hp_contraction(const RotatedChannel& ch, const CMatrix& w) {
  require(ch.dK == ch.dA && ch.dL == ch.dB,
          "hp_contraction: symmetric output partition required");
  const Index dA = ch.dA, dB = ch.dB;
  require(w.rows() == dA * dA && w.cols() == dA * dA,
          "hp_contraction: sender unitary has the wrong dimension");
  // Column (p,q) of W^T F is row (q,p) of W; the pairing trace then matches
  // leading row factor i < dB against leading column factor i < dA.
  CMatrix p(dA * dA, dA * dA);
  for (Index a = 0; a < dA; ++a)
    for (Index b = 0; b < dA; ++b) p.col(a * dA + b) = w.row(b * dA + a).transpose();
  const CMatrix x = ch.uo * p;
  const Index m = std::min(dA, dB);
  CMatrix t = CMatrix::Zero(dB, dA);
  for (Index i = 0; i < m; ++i) t += x.block(i * dB, i * dA, dB, dA);
  return t;
}

double hp_fidelity(const RotatedChannel& ch, const CMatrix& w) {
  require(ch.dK == ch.dA && ch.dL == ch.dB,
          "hp_fidelity: symmetric output partition required");
  const Index dA = ch.dA, dB = ch.dB;
  require(w.rows() == dA * dA && w.cols() == dA * dA,
          "hp_fidelity: sender unitary has the wrong dimension");
  require((w.adjoint() * w - CMatrix::Identity(dA * dA, dA * dA)).norm() <= 1e-8,
          "hp_fidelity: sender matrix is not unitary");
  return hp_contraction(ch, w).squaredNorm() / (dA * static_cast<double>(dB) * dB);
}

MixedProbeValue mixed_probe_fidelity(const RotatedChannel& ch, const RecoveryMap& r,
                                     const MixedProbe& probe) {
  MixedProbeValue out;
  for (std::size_t i = 0; i < probe.weights.size(); ++i) {
    const CMatrix& chi = probe.operators[i];
    require(chi.cols() == ch.dB && chi.rows() == chi.cols(),
            "mixed_probe_fidelity: operators must be square on the B space");
    const CMatrix m = apply_probe(ch.uo, chi, ch.dL);
    require(r.r.rows() == ch.dK * ch.dA && r.r.cols() == m.rows(),
            "mixed_probe_fidelity: recovery shape incompatible");
    const double t = std::abs(trace_product(r.r, m));
    out.fidelity += probe.weights[i] * t * t / denom(ch);
    out.fProbe += probe.weights[i] * std::norm(chi.trace()) / ch.dB;
  }
  return out;
}

MixedRecoveryResult optimize_recovery_for_mixed_probe(const RotatedChannel& ch,
                                                      const MixedProbe& probe,
                                                      int maxIter, double tol) {
  require(maxIter >= 1 && tol > 0.0,
          "optimize_recovery_for_mixed_probe: bad iteration settings");
  std::vector<CMatrix> ms;
  ms.reserve(probe.operators.size());
  for (const CMatrix& chi : probe.operators) {
    require(chi.cols() == ch.dB && chi.rows() == chi.cols(),
            "optimize_recovery_for_mixed_probe: operators must be square");
    ms.push_back(apply_probe(ch.uo, chi, ch.dL));
  }
  require(ms.front().rows() >= ms.front().cols(),
          "optimize_recovery_for_mixed_probe: recovery space too small");

  CMatrix mix = CMatrix::Zero(ms.front().rows(), ms.front().cols());
  for (std::size_t i = 0; i < ms.size(); ++i) mix += probe.weights[i] * ms[i];
  CMatrix r = linalg::polar_coisometry(mix);

  // Minorize-maximize on sum_i p_i |Tr[R M_i]|^2: replace each |.|^2 by its
  // tangent at the current iterate and solve the linear trace maximization
  // by a polar step.  The objective never decreases.
  double value = 0.0;
  int it = 0;
  for (; it < maxIter; ++it) {
    CMatrix n = CMatrix::Zero(mix.rows(), mix.cols());
    double g = 0.0;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const Complex c = trace_product(r, ms[i]);
      g += probe.weights[i] * std::norm(c);
      n += probe.weights[i] * std::conj(c) * ms[i];
    }
    if (it > 0 && std::abs(g - value) <= tol * std::max(value, 1e-30)) {
      value = g;
      break;
    }
    value = g;
    r = linalg::polar_coisometry(n);
  }
  MixedRecoveryResult res;
  res.recovery.r = std::move(r);
  res.fidelity = value / denom(ch);
  res.iterations = it;
  return res;
}

TradeoffResult check_tradeoff(const CMatrix& rho, const CVector& psiA,
                              const CVector& phiB) {
  const Index dA = psiA.size(), dB = phiB.size();
  require(dA >= 1 && dB >= 1 && rho.rows() == dA * dB && rho.cols() == dA * dB,
          "check_tradeoff: state dimension must be dim(psiA)*dim(phiB)");
  const double scale = std::max(rho.norm(), 1e-300);
  require((rho - rho.adjoint()).norm() <= 1e-10 * scale,
          "check_tradeoff: state is not Hermitian");
  require(std::abs(rho.trace().real() - 1.0) <= 1e-8,
          "check_tradeoff: state must have unit trace");
  {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -1e-10)
      throw std::invalid_argument("check_tradeoff: state is not positive semidefinite");
  }
  const CMatrix rhoA = linalg::partial_trace(rho, BiPartition{dA, dB}, Keep::First);
  const CMatrix rhoB = linalg::partial_trace(rho, BiPartition{dA, dB}, Keep::Second);
  TradeoffResult res;
  res.fA = (psiA.adjoint() * rhoA * psiA)(0).real();
  res.fB = (phiB.adjoint() * rhoB * phiB)(0).real();
  CVector joint(dA * dB);
  for (Index a = 0; a < dA; ++a)
    for (Index b = 0; b < dB; ++b) joint(a * dB + b) = psiA(a) * phiB(b);
  res.fAB = (joint.adjoint() * rho * joint)(0).real();
  const auto root = [](double x) { return std::sqrt(std::max(0.0, x)); };
  res.slack = root(1.0 - res.fA) + root(1.0 - res.fB) -
              (2.0 / 3.0) * (1.0 - res.fAB);
  return res;
}

}  // namespace qhack::hacking
