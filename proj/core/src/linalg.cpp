#include "qhack/linalg.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qhack::linalg {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::string dim_str(const CMatrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = 0; k < a.cols(); ++k)
      out.block(i * b.rows(), k * b.cols(), b.rows(), b.cols()) = a(i, k) * b;
  return out;
}

CMatrix partial_trace(const CMatrix& m, const BiPartition& part, Keep keep) {
  const Index d1 = part.first, d2 = part.second;
  require(d1 > 0 && d2 > 0, "partial_trace: partition dimensions must be positive");
  require(m.rows() == m.cols() && m.rows() == d1 * d2,
          "partial_trace: matrix is " + dim_str(m) + " but partition gives " +
              std::to_string(d1 * d2));
  if (keep == Keep::First) {
    CMatrix out = CMatrix::Zero(d1, d1);
    for (Index i = 0; i < d1; ++i)
      for (Index ip = 0; ip < d1; ++ip)
        for (Index j = 0; j < d2; ++j) out(i, ip) += m(i * d2 + j, ip * d2 + j);
    return out;
  }
  CMatrix out = CMatrix::Zero(d2, d2);
  for (Index j = 0; j < d2; ++j)
    for (Index jp = 0; jp < d2; ++jp)
      for (Index i = 0; i < d1; ++i) out(j, jp) += m(i * d2 + j, i * d2 + jp);
  return out;
}

CMatrix trace_out_first(const CMatrix& m, Index d) {
  require(d > 0 && m.rows() % d == 0 && m.cols() % d == 0,
          "trace_out_first: leading dimension " + std::to_string(d) +
              " does not divide " + dim_str(m));
  const Index p = m.rows() / d, q = m.cols() / d;
  CMatrix out = CMatrix::Zero(p, q);
  for (Index i = 0; i < d; ++i) out += m.block(i * p, i * q, p, q);
  return out;
}

CMatrix rotate_clockwise(const CMatrix& u, const BiPartition& rowPart,
                         const BiPartition& colPart) {
  const Index d1 = rowPart.first, d2 = rowPart.second;
  const Index c1 = colPart.first, c2 = colPart.second;
  require(d1 > 0 && d2 > 0 && c1 > 0 && c2 > 0,
          "rotate_clockwise: partition dimensions must be positive");
  require(u.rows() == d1 * d2 && u.cols() == c1 * c2,
          "rotate_clockwise: matrix is " + dim_str(u) + " but partitions give " +
              std::to_string(d1 * d2) + "x" + std::to_string(c1 * c2));
  CMatrix out(d2 * c2, d1 * c1);
  for (Index i = 0; i < d2; ++i)
    for (Index j = 0; j < c2; ++j)
      for (Index k = 0; k < d1; ++k)
        for (Index l = 0; l < c1; ++l)
          out(i * c2 + j, k * c1 + l) = u(k * d2 + i, l * c2 + j);
  return out;
}

CMatrix rotate_anticlockwise(const CMatrix& v, const BiPartition& rowPart,
                             const BiPartition& colPart) {
  const Index d2 = rowPart.first, c2 = rowPart.second;
  const Index d1 = colPart.first, c1 = colPart.second;
  require(d1 > 0 && d2 > 0 && c1 > 0 && c2 > 0,
          "rotate_anticlockwise: partition dimensions must be positive");
  require(v.rows() == d2 * c2 && v.cols() == d1 * c1,
          "rotate_anticlockwise: matrix is " + dim_str(v) + " but partitions give " +
              std::to_string(d2 * c2) + "x" + std::to_string(d1 * c1));
  CMatrix out(d1 * d2, c1 * c2);
  for (Index i = 0; i < d2; ++i)
    for (Index j = 0; j < c2; ++j)
      for (Index k = 0; k < d1; ++k)
        for (Index l = 0; l < c1; ++l)
          out(k * d2 + i, l * c2 + j) = v(i * c2 + j, k * c1 + l);
  return out;
}

SvdFactors svd(const CMatrix& m) {
  require(m.rows() > 0 && m.cols() > 0, "svd: empty matrix");
  // Jacobi is exact enough and fast below ~64; bidiagonal divide and conquer
  // scales to the larger operators.
  SvdFactors f;
  if (m.rows() <= 64 && m.cols() <= 64) {
    Eigen::JacobiSVD<CMatrix> s(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (s.info() != Eigen::Success)
      throw std::runtime_error("svd: factorization failed for " + dim_str(m) + " matrix");
    f.left = s.matrixU();
    f.singulars = s.singularValues();
    f.rightAdj = s.matrixV().adjoint();
  } else {
    Eigen::BDCSVD<CMatrix> s(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (s.info() != Eigen::Success)
      throw std::runtime_error("svd: factorization failed for " + dim_str(m) + " matrix");
    f.left = s.matrixU();
    f.singulars = s.singularValues();
    f.rightAdj = s.matrixV().adjoint();
  }
  return f;
}

double schatten_norm(const CMatrix& m, double p) {
  require(p >= 1.0, "schatten_norm: order must satisfy p >= 1");
  const RVector s = svd(m).singulars;
  if (std::isinf(p)) return s.size() ? s(0) : 0.0;
  if (p == 1.0) return s.sum();
  if (p == 2.0) return s.norm();
  double acc = 0.0;
  for (Index i = 0; i < s.size(); ++i) acc += std::pow(s(i), p);
  return std::pow(acc, 1.0 / p);
}

CMatrix polar_coisometry(const CMatrix& m) {
  require(m.rows() >= m.cols(),
          "polar_coisometry: need rows >= cols, got " + dim_str(m));
  const SvdFactors f = svd(m);
  return f.rightAdj.adjoint() * f.left.adjoint();
}

CMatrix abs_left(const CMatrix& m) {
  const SvdFactors f = svd(m);
  return f.left * f.singulars.asDiagonal() * f.left.adjoint();
}

CMatrix pinv_on_support(const CMatrix& h, double relTol) {
  require(h.rows() == h.cols(), "pinv_on_support: matrix is " + dim_str(h));
  require(relTol > 0.0, "pinv_on_support: relTol must be positive");
  const double scale = h.norm();
  if ((h - h.adjoint()).norm() > 1e-10 * std::max(scale, 1e-300))
    throw std::invalid_argument("pinv_on_support: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("pinv_on_support: eigendecomposition failed for " +
                             dim_str(h) + " matrix");
  const RVector& ev = es.eigenvalues();
  const double cutoff = relTol * ev.cwiseAbs().maxCoeff();
  RVector inv = RVector::Zero(ev.size());
  for (Index i = 0; i < ev.size(); ++i)
    if (ev(i) > cutoff) inv(i) = 1.0 / ev(i);
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix complete_to_unitary(const CMatrix& r) {
  const Index c = r.rows(), n = r.cols();
  require(c <= n, "complete_to_unitary: more rows than columns, " + dim_str(r));
  const CMatrix gram = r * r.adjoint();
  if ((gram - CMatrix::Identity(c, c)).norm() > 1e-8)
    throw std::invalid_argument("complete_to_unitary: rows are not orthonormal");
  if (c == n) return r;
  // Complete the adjoint, whose columns are orthonormal, then transpose back.
  CMatrix q(n, n);
  q.leftCols(c) = r.adjoint();
  Index filled = c;
  for (Index cand = 0; cand < n && filled < n; ++cand) {
    CVector v = CVector::Zero(n);
    v(cand) = 1.0;
    // Two Gram-Schmidt passes keep the completion orthonormal to ~1e-14.
    for (int pass = 0; pass < 2; ++pass)
      for (Index j = 0; j < filled; ++j) v -= q.col(j).dot(v) * q.col(j);
    const double nv = v.norm();
    if (nv <= 1e-8) continue;
    q.col(filled++) = v / nv;
  }
  if (filled < n)
    throw std::runtime_error("complete_to_unitary: completion exhausted candidates");
  return q.adjoint();
}

}  // namespace qhack::linalg
