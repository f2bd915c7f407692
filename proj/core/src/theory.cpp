#include "qhack/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace qhack::theory {

namespace {

// 2F1(a,b;c;z) by term recurrence: t_{n+1}/t_n = (a+n)(b+n) z / ((c+n)(n+1)).
// Admissible parameter sets here have c - a - b > 1, so the series converges
// on all of [0, 1], but only polynomially at z = 1 (terms fall like
// n^-(1+c-a-b)); the iteration cap is sized for that worst case, where the
// cutoff |term| < 1e-16 leaves a tail of order 1e-12.
double hyp2f1_series(double a, double b, double c, double z) {
  double term = 1.0, sum = 1.0;
  for (int n = 0; n < 2000000; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
    sum += term;
    if (std::abs(term) < 1e-16) return sum;
  }
  throw std::runtime_error("hyp2f1_series: no convergence within the term cap");
}

}  // namespace

double DimensionProfile::kappa() const {
  if (dA <= 0 || dB <= 0)
    throw std::invalid_argument("DimensionProfile: dA and dB must be positive");
  return static_cast<double>(dB) / static_cast<double>(dA);
}

double hyp2f1_half(double z) {
  if (!(z >= 0.0 && z <= 1.0))
    throw std::invalid_argument("hyp2f1_half: argument must lie in [0, 1]");
  return hyp2f1_series(0.5, -0.5, 2.0, z);
}

double hyp2f1_moment(double m, double z) {
  if (!(z >= 0.0 && z <= 1.0))
    throw std::invalid_argument("hyp2f1_moment: argument must lie in [0, 1]");
  return hyp2f1_series(1.0 - m, -m, 2.0, z);
}

double mp_moment_quadrature(double lambda, double m) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("mp_moment_quadrature: lambda must lie in (0, 1]");
  const double sq = std::sqrt(lambda);
  const double lo = (1.0 - sq) * (1.0 - sq);
  const double hi = (1.0 + sq) * (1.0 + sq);
  const double c = 0.5 * (hi + lo), h = 0.5 * (hi - lo);
  const double pi = 3.14159265358979323846;
  auto f = [&](double x) {
    return std::pow(x, m - 1.0) * std::sqrt((hi - x) * (x - lo)) / (2.0 * pi * lambda);
  };
  // Tanh-sinh quadrature on [lo, hi]; double-exponential node decay absorbs
  // the endpoint square-root (and, at lambda = 1, the x^(m-1)) singularities.
  auto level_sum = [&](double step, bool oddOnly) {
    double acc = 0.0;
    for (int side = -1; side <= 1; side += 2) {
      for (int j = oddOnly ? 1 : 0;; j += oddOnly ? 2 : 1) {
        if (j == 0 && side > 0) continue;  // center point counted once
        const double t = side * j * step;
        const double u = 0.5 * pi * std::sinh(t);
        const double x = c + h * std::tanh(u);
        const double w = 0.5 * pi * std::cosh(t) / std::pow(std::cosh(u), 2);
        if (x <= lo || x >= hi) break;
        const double contrib = w * f(x);
        acc += contrib;
        if (std::abs(contrib) < 1e-18 && j * step > 3.0) break;
      }
    }
    return acc;
  };
  double step = 1.0;
  double total = level_sum(step, false);
  double estimate = h * step * total;
  for (int level = 1; level <= 12; ++level) {
    step *= 0.5;
    total += level_sum(step, true);
    const double next = h * step * total;
    if (level >= 3 && std::abs(next - estimate) < 1e-11) return next;
    estimate = next;
  }
  throw std::runtime_error("mp_moment_quadrature: no convergence to tolerance");
}

double i_kappa(double kappa) {
  if (!(kappa > 0.0)) throw std::invalid_argument("i_kappa: kappa must be positive");
  const double k2 = kappa * kappa;
  return hyp2f1_half(std::min(k2, 1.0 / k2));
}

double i_kappa_approx(double kappa) {
  if (!(kappa > 0.0))
    throw std::invalid_argument("i_kappa_approx: kappa must be positive");
  return 1.0 - 1.0 / (8.0 * kappa * kappa);
}

double avg_p_opt_real(double dA, double dB, double dK, double dL, double d0) {
  if (!(dA > 0 && dB > 0 && dK > 0 && dL > 0 && d0 > 0))
    throw std::invalid_argument("avg_p_opt: dimensions must be positive");
  const double q = (dB * dL) / (dA * dK);
  const double i = i_kappa(std::sqrt(q));
  const double i2 = i * i;
  const double floor = (1.0 - i2) / (dA * dK);
  const double lead = (q >= 1.0) ? i2 : q * i2;
  return (lead + floor) / (d0 * d0);
}

double avg_p_opt(const DimensionProfile& profile) {
  const double dK = profile.dK > 0 ? profile.dK : profile.dA;
  const double dL = profile.dL > 0 ? profile.dL : profile.dB;
  return avg_p_opt_real(profile.dA, profile.dB, dK, dL, profile.d0);
}

}  // namespace qhack::theory
