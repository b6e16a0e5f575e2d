#include "wiretap/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wiretap/errors.hpp"

namespace wiretap {

namespace {

int rank_from_singular_values(const RVector& sv, double tol) {
  if (sv.size() == 0) return 0;
  const double smax = sv.maxCoeff();
  if (!(smax > 0.0)) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol * smax) ++r;
  }
  return r;
}

}  // namespace

int numeric_rank(const CMatrix& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return rank_from_singular_values(svd.singularValues(), tol);
}

CMatrix null_space_basis(const CMatrix& a, double tol) {
  const Eigen::Index n = a.cols();
  if (n == 0) return CMatrix(0, 0);
  if (a.rows() == 0) return CMatrix::Identity(n, n);
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
  const int r = rank_from_singular_values(svd.singularValues(), tol);
  return svd.matrixV().rightCols(n - r);
}

CMatrix orth_basis(const CMatrix& a, double tol) {
  if (a.cols() == 0 || a.rows() == 0) return CMatrix(a.rows(), 0);
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU);
  const int r = rank_from_singular_values(svd.singularValues(), tol);
  return svd.matrixU().leftCols(r);
}

bool span_contained(const CMatrix& a, const CMatrix& b, double tol) {
  if (a.rows() != b.rows()) {
    throw InvalidInput("span_contained: row counts differ");
  }
  if (a.cols() == 0) return true;
  const double na = a.norm();
  if (na == 0.0) return true;
  const CMatrix qb = orth_basis(b, tol);
  const CMatrix residual = a - qb * (qb.adjoint() * a);
  return residual.norm() <= tol * na;
}

bool span_intersection_trivial(const CMatrix& a, const CMatrix& b,
                               double tol) {
  if (a.rows() != b.rows()) {
    throw InvalidInput("span_intersection_trivial: row counts differ");
  }
  const CMatrix qa = orth_basis(a, tol);
  const CMatrix qb = orth_basis(b, tol);
  if (qa.cols() == 0 || qb.cols() == 0) return true;
  return numeric_rank(hcat(qa, qb), tol) == qa.cols() + qb.cols();
}

SubspaceDims subspace_dims_oracle(const CMatrix& h, const CMatrix& g,
                                  double tol) {
  if (h.rows() != g.rows()) {
    throw InvalidInput("subspace_dims_oracle: row counts differ");
  }
  const int rh = numeric_rank(h, tol);
  const int rg = numeric_rank(g, tol);
  const int k = numeric_rank(hcat(h, g), tol);
  return SubspaceDims{k, k - rh, k - rg, rh + rg - k};
}

CMatrix hcat(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows()) throw InvalidInput("hcat: row counts differ");
  CMatrix out(a.rows(), a.cols() + b.cols());
  out.leftCols(a.cols()) = a;
  out.rightCols(b.cols()) = b;
  return out;
}

double frobenius_relative_residual(const CMatrix& lhs, const CMatrix& rhs,
                                   double scale) {
  const double denom = scale > 0.0 ? scale : 1.0;
  return (lhs - rhs).norm() / denom;
}

HermitianEigen hermitian_eigen(const CMatrix& a) {
  if (a.rows() == 0) return {RVector(0), CMatrix(0, 0)};
  const CMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
  return {es.eigenvalues(), es.eigenvectors()};
}

double ln_det_hpd(const CMatrix& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::LLT<CMatrix> llt(0.5 * (a + a.adjoint()));
  if (llt.info() != Eigen::Success) {
    throw InvalidInput("ln_det_hpd: matrix is not positive definite");
  }
  double acc = 0.0;
  const CMatrix& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log(l(i, i).real());
  return 2.0 * acc;
}

double log2_det_hpd(const CMatrix& a) { return ln_det_hpd(a) / std::log(2.0); }

GsvdResult gsvd_transform(const CMatrix& h, const CMatrix& g, double tol) {
  if (h.rows() != g.rows()) {
    throw InvalidInput("gsvd_transform: h has " + std::to_string(h.rows()) +
                       " rows, g has " + std::to_string(g.rows()));
  }
  const Eigen::Index n = h.rows();
  const Eigen::Index m = h.cols();
  const Eigen::Index kk = g.cols();

  const SubspaceDims dims = subspace_dims_oracle(h, g, tol);
  const int k = dims.k;

  GsvdResult out;
  out.k = k;
  out.r = dims.r;
  out.s = dims.s;
  out.p = dims.p;
  out.d1 = Eigen::MatrixXd::Zero(m, k);
  out.d2 = Eigen::MatrixXd::Zero(kk, k);
  out.s1_diag = RVector::Zero(dims.s);
  out.s2_diag = RVector::Zero(dims.s);

  if (k == 0) {
    out.psi1 = CMatrix::Identity(m, m);
    out.psi2 = CMatrix::Identity(kk, kk);
    out.x = CMatrix(n, 0);
    return out;
  }

  // [h g]^H = U S V^H restricted to its rank-k part; U splits into the
  // orthonormal-stacked blocks U1 (M x k) and U2 (K x k).
  CMatrix stacked(m + kk, n);
  stacked.topRows(m) = h.adjoint();
  stacked.bottomRows(kk) = g.adjoint();
  Eigen::JacobiSVD<CMatrix> outer(stacked,
                                  Eigen::ComputeThinU | Eigen::ComputeThinV);
  const CMatrix uk = outer.matrixU().leftCols(k);
  const RVector sk = outer.singularValues().head(k);
  const CMatrix vk = outer.matrixV().leftCols(k);
  const CMatrix u1 = uk.topRows(m);
  const CMatrix u2 = uk.bottomRows(kk);

  // CS step: U1 = Psi1 C Z^H with C descending, so the r-block (C = 1) comes
  // first, then the shared block, then the p-block (C = 0).
  CMatrix z = CMatrix::Identity(k, k);
  RVector c = RVector::Zero(k);
  if (m > 0) {
    Eigen::JacobiSVD<CMatrix> cs(u1, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.psi1 = cs.matrixU();
    z = cs.matrixV();
    const RVector& sv = cs.singularValues();
    c.head(sv.size()) = sv;
  } else {
    out.psi1 = CMatrix(0, 0);
  }

  out.x = vk * sk.asDiagonal() * z;

  const int r = dims.r;
  const int s = dims.s;
  const int p = dims.p;
  for (int j = 0; j < r; ++j) out.d1(j, j) = 1.0;
  for (int j = 0; j < s; ++j) out.d1(r + j, r + j) = c(r + j);

  const CMatrix u2z = u2 * z;
  const Eigen::Index offset2 = kk - s - p;
  CMatrix filled(kk, s + p);
  for (int j = 0; j < s + p; ++j) {
    const CVector col = u2z.col(r + j);
    const double nrm = col.norm();
    if (!(nrm > 0.0)) {
      throw DegenerateChannel("gsvd_transform: vanishing shared direction");
    }
    filled.col(j) = col / nrm;
    out.d2(offset2 + j, r + j) = j < s ? nrm : 1.0;
    if (j < s) {
      out.s1_diag(j) = c(r + j);
      out.s2_diag(j) = nrm;
    }
  }
  out.psi2 = CMatrix(kk, kk);
  if (offset2 > 0) {
    out.psi2.leftCols(offset2) = null_space_basis(filled.adjoint(), tol);
  }
  out.psi2.rightCols(s + p) = filled;
  return out;
}

}  // namespace wiretap
