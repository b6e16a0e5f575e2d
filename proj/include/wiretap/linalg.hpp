#pragma once

#include <complex>

#include <Eigen/Dense>

namespace wiretap {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Singular values at or below `kRankTol * sigma_max` count as zero.
inline constexpr double kRankTol = 1e-9;

/// Number of singular values of `a` above `tol * sigma_max`. Empty and zero
/// matrices have rank 0.
int numeric_rank(const CMatrix& a, double tol = kRankTol);

/// Orthonormal basis (N x (N - rank)) for the null space of an M x N matrix.
CMatrix null_space_basis(const CMatrix& a, double tol = kRankTol);

/// Orthonormal basis for the column span of `a` (N x rank).
CMatrix orth_basis(const CMatrix& a, double tol = kRankTol);

/// True when every column of `a` lies in span(b): the projection residual of
/// `a` onto span(b) is at most `tol * ||a||`. Zero-column and zero `a` are
/// always contained.
bool span_contained(const CMatrix& a, const CMatrix& b, double tol = kRankTol);

/// True when span(a) and span(b) meet only in {0}, i.e.
/// rank([a b]) = rank(a) + rank(b) at tolerance.
bool span_intersection_trivial(const CMatrix& a, const CMatrix& b,
                               double tol = kRankTol);

/// Subspace dimensions of the pair (h, g) from rank arithmetic alone:
/// k = rank([h g]), p = k - rank(h), r = k - rank(g), s = rank(h) + rank(g) - k.
struct SubspaceDims {
  int k = 0;
  int p = 0;
  int r = 0;
  int s = 0;

  friend bool operator==(const SubspaceDims&, const SubspaceDims&) = default;
};

SubspaceDims subspace_dims_oracle(const CMatrix& h, const CMatrix& g,
                                  double tol = kRankTol);

/// Joint decomposition of h (N x M) and g (N x K):
///
///   h * psi1 = x * d1^H,    g * psi2 = x * d2^H,    d1^H d1 + d2^H d2 = I
///
/// with psi1, psi2 unitary and x (N x k) of full column rank. Column blocks of
/// x are ordered (r, s, p):
///
///   d1 = [I_r 0 0; 0 S1 0; 0 0 0]   (M x k)
///   d2 = [0 0 0; 0 S2 0; 0 0 I_p]   (K x k)
///
/// The s-block is sorted by descending S1. Columns r..r+s-1 of psi1 and
/// K-s-p..K-p-1 of psi2 map onto the same columns of x; those are the
/// directions shared by span(h) and span(g).
struct GsvdResult {
  CMatrix psi1;
  CMatrix psi2;
  Eigen::MatrixXd d1;
  Eigen::MatrixXd d2;
  CMatrix x;
  int k = 0;
  int r = 0;
  int s = 0;
  int p = 0;
  RVector s1_diag;
  RVector s2_diag;

  /// First psi1 column of the shared block.
  int psi1_common_offset() const { return r; }
  /// First psi2 column of the shared block.
  int psi2_common_offset() const {
    return static_cast<int>(psi2.cols()) - s - p;
  }
};

/// Throws InvalidInput when the row counts of h and g differ.
GsvdResult gsvd_transform(const CMatrix& h, const CMatrix& g,
                          double tol = kRankTol);

/// ||lhs - rhs||_F / scale, with a zero scale treated as 1.
double frobenius_relative_residual(const CMatrix& lhs, const CMatrix& rhs,
                                   double scale);

/// Horizontal concatenation that accepts zero-column operands.
CMatrix hcat(const CMatrix& a, const CMatrix& b);

/// Eigen-decomposition of a hermitian matrix (eigenvalues ascending).
struct HermitianEigen {
  RVector values;
  CMatrix vectors;
};
HermitianEigen hermitian_eigen(const CMatrix& a);

/// log2 det of a hermitian positive definite matrix via Cholesky.
double log2_det_hpd(const CMatrix& a);
/// Natural-log det of a hermitian positive definite matrix.
double ln_det_hpd(const CMatrix& a);

}  // namespace wiretap
