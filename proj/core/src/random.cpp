#include "qhack/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qhack::random {

namespace {

// SplitMix64 finalizer; mixes (masterSeed, streamId) into one engine seed.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t masterSeed, std::uint64_t streamId)
    : engine_(mix64(mix64(masterSeed) ^ (0x9e3779b97f4a7c15ULL * (streamId + 1)))) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gauss() {
  if (hasSpare_) {
    hasSpare_ = false;
    return spare_;
  }
  // Box-Muller; u1 shifted into (0, 1] so the log is finite.
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  hasSpare_ = true;
  return r * std::cos(a);
}

Complex Rng::gauss_complex() {
  const double re = gauss();
  const double im = gauss();
  return Complex(re, im) * std::numbers::sqrt2 / 2.0;
}

CMatrix ginibre(Index rows, Index cols, Rng& rng) {
  if (rows <= 0 || cols <= 0)
    throw std::invalid_argument("ginibre: dimensions must be positive");
  CMatrix g(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) g(i, j) = rng.gauss_complex();
  return g;
}

CMatrix haar_unitary(Index n, Rng& rng) {
  if (n <= 0) throw std::invalid_argument("haar_unitary: dimension must be positive");
  const CMatrix g = ginibre(n, n, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix& qrMat = qr.matrixQR();
  // Fixing column phases to the diagonal of R makes the QR map measure-
  // preserving from Ginibre to Haar.
  for (Index j = 0; j < n; ++j) {
    const Complex d = qrMat(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0.0) ? d / a : Complex(1.0, 0.0);
  }
  return q;
}

ProbeOperator random_probe(Index dB, Rng& rng) {
  CMatrix g = ginibre(dB, dB, rng);
  g /= g.norm();
  return ProbeOperator::make(std::move(g));
}

DensityAndPure random_density_and_pure(Index dA, Index dB, Rng& rng) {
  if (dA <= 0 || dB <= 0)
    throw std::invalid_argument("random_density_and_pure: dimensions must be positive");
  DensityAndPure out;
  const Index n = dA * dB;
  const CMatrix g = ginibre(n, n, rng);
  out.rho = g * g.adjoint();
  out.rho /= out.rho.trace().real();
  out.psiA = CVector(dA);
  for (Index i = 0; i < dA; ++i) out.psiA(i) = rng.gauss_complex();
  out.psiA /= out.psiA.norm();
  out.phiB = CVector(dB);
  for (Index i = 0; i < dB; ++i) out.phiB(i) = rng.gauss_complex();
  out.phiB /= out.phiB.norm();
  return out;
}

}  // namespace qhack::random
