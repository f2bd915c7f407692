#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

// Dense complex linear algebra used throughout: Kronecker products, partial
// traces, the clockwise index rotation, Schatten norms, and polar/SVD helpers.
//
// Composite-space convention: a bipartite index (i,j) with j the faster axis,
// i.e. row (i,j) of an operator on a d1*d2-dimensional space is i*d2 + j.

namespace qhack::linalg {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Complex = std::complex<double>;
using Index = Eigen::Index;

// Dimensions (d1, d2) of the two tensor factors of a composite space.
struct BiPartition {
  Index first = 0;
  Index second = 0;
};

enum class Keep { First, Second };

// Thin SVD m = left * diag(singulars) * rightAdj.  left is r x k with
// orthonormal columns, rightAdj is k x c with orthonormal rows,
// k = min(r, c), singulars non-increasing and non-negative.
struct SvdFactors {
  CMatrix left;
  RVector singulars;
  CMatrix rightAdj;
};

// Kronecker product; row (i,j) of the result is i*rows(b)+j.
CMatrix kron(const CMatrix& a, const CMatrix& b);

// Partial trace of a square operator on a space partitioned as
// part.first (x) part.second; keeps the named factor.
CMatrix partial_trace(const CMatrix& m, const BiPartition& part, Keep keep);

// Trace over a shared leading factor of dimension d: m has rows (i,j) with
// j in [rows(m)/d] and columns (i,j') with j' in [cols(m)/d]; the result is
// (rows(m)/d) x (cols(m)/d) with entries sum_i m[(i,j),(i,j')].
// Rectangular counterpart of partial_trace(..., Keep::Second).
CMatrix trace_out_first(const CMatrix& m, Index d);

// Clockwise index rotation: for input U with row partition (d1,d2) and
// column partition (c1,c2), the output V satisfies
//   V[(i,j),(k,l)] = U[(k,i),(l,j)],
// so V has shape (d2*c2) x (d1*c1).  A pure entry permutation: the
// Frobenius norm is preserved exactly.
CMatrix rotate_clockwise(const CMatrix& u, const BiPartition& rowPart,
                         const BiPartition& colPart);

// Inverse of rotate_clockwise.  rowPart/colPart describe the *input* v:
// rows (i,j) with i in [rowPart.first], j in [rowPart.second], columns
// (k,l) likewise.  Output U of shape (rowPart.first*colPart.first) x
// (rowPart.second*colPart.second) with U[(k,i),(l,j)] = v[(i,j),(k,l)].
CMatrix rotate_anticlockwise(const CMatrix& v, const BiPartition& rowPart,
                             const BiPartition& colPart);

// Thin SVD with non-increasing singular values.  Throws on factorization
// failure (diagnostic names the matrix dimensions).
SvdFactors svd(const CMatrix& m);

// Schatten p-norm (sum_i s_i^p)^(1/p); p = inf gives the largest singular
// value.  Requires p >= 1.
double schatten_norm(const CMatrix& m, double p);
inline constexpr double kSchattenInf = std::numeric_limits<double>::infinity();

// Closest coisometry in the trace pairing: for m of shape r x c with r >= c
// and thin SVD m = W S V^+, returns R = V W^+ of shape c x r, satisfying
// R R^+ = I_c and Tr[R m] = ||m||_1.
CMatrix polar_coisometry(const CMatrix& m);

// |m^+| = sqrt(m m^+) = W S W^+, the PSD polar factor living on the row
// space of m.  Shape rows(m) x rows(m), rank <= min(rows, cols).
CMatrix abs_left(const CMatrix& m);

// Moore-Penrose pseudoinverse of a Hermitian PSD matrix, inverting only
// eigenvalues above relTol * max_eigenvalue.  Rejects non-Hermitian input
// (asymmetry > 1e-10 * ||h||_2).
CMatrix pinv_on_support(const CMatrix& h, double relTol);

// Extends a coisometry r (c x n rows-orthonormal, c <= n) to an n x n
// unitary whose first c rows are r.  Remaining rows come from Gram-Schmidt
// over the canonical basis in index order, skipping near-dependent
// candidates (residual norm <= 1e-8).  Rejects input whose rows are not
// orthonormal within 1e-8.
CMatrix complete_to_unitary(const CMatrix& r);

}  // namespace qhack::linalg
