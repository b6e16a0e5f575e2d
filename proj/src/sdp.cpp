#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "wiretap/convex.hpp"
#include "wiretap/errors.hpp"

namespace wiretap {

RMatrix embed_hermitian(const CMatrix& a) {
  const Eigen::Index n = a.rows();
  RMatrix e(2 * n, 2 * n);
  e.topLeftCorner(n, n) = a.real();
  e.bottomRightCorner(n, n) = a.real();
  e.topRightCorner(n, n) = -a.imag();
  e.bottomLeftCorner(n, n) = a.imag();
  return e;
}

CMatrix deembed_hermitian(const RMatrix& e) {
  const Eigen::Index n = e.rows() / 2;
  const RMatrix re = 0.5 * (e.topLeftCorner(n, n) + e.bottomRightCorner(n, n));
  const RMatrix im = 0.5 * (e.bottomLeftCorner(n, n) - e.topRightCorner(n, n));
  CMatrix a(n, n);
  a.real() = re;
  a.imag() = im;
  return 0.5 * (a + a.adjoint());
}

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::kOptimal: return "optimal";
    case SdpStatus::kInfeasible: return "infeasible";
    case SdpStatus::kNumericalFailure: return "numerical-failure";
  }
  return "?";
}

namespace {

// Orthonormal basis of n x n hermitian matrices under <A,B> = Re tr(AB):
// diagonal units first, then for each k < l the symmetric and the
// antisymmetric-imaginary pair.
std::vector<CMatrix> hermitian_basis(int n) {
  std::vector<CMatrix> basis;
  basis.reserve(static_cast<size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    CMatrix e = CMatrix::Zero(n, n);
    e(k, k) = 1.0;
    basis.push_back(std::move(e));
  }
  const double h = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l) {
      CMatrix sym = CMatrix::Zero(n, n);
      sym(k, l) = h;
      sym(l, k) = h;
      basis.push_back(std::move(sym));
      CMatrix anti = CMatrix::Zero(n, n);
      anti(k, l) = cplx(0.0, h);
      anti(l, k) = cplx(0.0, -h);
      basis.push_back(std::move(anti));
    }
  }
  return basis;
}

double re_trace_product(const CMatrix& a, const CMatrix& b) {
  // Re tr(A B) without forming the product.
  return (a.transpose().cwiseProduct(b)).sum().real();
}

double frob_dot(const RMatrix& a, const RMatrix& b) {
  return a.cwiseProduct(b).sum();
}

// Block-diagonal real SDP in LMI form:
//   maximize b^T z   s.t.  S = C - sum_j z_j A_j >= 0
// paired with  minimize C.X  s.t.  A_j.X = b_j, X >= 0.
struct CoreSdp {
  std::vector<RMatrix> c;
  std::vector<std::vector<RMatrix>> a;  // a[j][block]
  RVector b;
};

struct CoreResult {
  SdpStatus status = SdpStatus::kNumericalFailure;
  RVector z;
  int iterations = 0;
  double gap = 0.0;
  double pres = 0.0;
  double dres = 0.0;
};

double max_step(const std::vector<RMatrix>& x, const std::vector<RMatrix>& dx) {
  double step = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < x.size(); ++k) {
    if (x[k].rows() == 1) {
      if (!(x[k](0, 0) > 0.0)) return 0.0;
      if (dx[k](0, 0) < 0.0) step = std::min(step, -x[k](0, 0) / dx[k](0, 0));
      continue;
    }
    Eigen::LLT<RMatrix> llt(x[k]);
    if (llt.info() != Eigen::Success) return 0.0;
    const RMatrix t = llt.matrixL().solve(dx[k]);
    const RMatrix w = llt.matrixL().solve(t.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (w + w.transpose()),
                                              Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    if (lmin < 0.0) step = std::min(step, -1.0 / lmin);
  }
  return step;
}

CoreResult solve_core(const CoreSdp& p, const SdpOptions& opt) {
  const size_t nb = p.c.size();
  const Eigen::Index m = p.b.size();
  CoreResult res;
  res.z = RVector::Zero(m);

  int n_total = 0;
  for (const auto& blk : p.c) n_total += static_cast<int>(blk.rows());

  std::vector<RMatrix> x(nb), s(nb);
  double c_norm = 0.0;
  for (size_t k = 0; k < nb; ++k) c_norm += p.c[k].squaredNorm();
  c_norm = std::sqrt(c_norm);
  const double b_norm = p.b.norm();

  for (size_t k = 0; k < nb; ++k) {
    const double nk = static_cast<double>(p.c[k].rows());
    double xi = std::max(10.0, std::sqrt(nk));
    double eta = std::max({10.0, std::sqrt(nk), p.c[k].norm()});
    for (Eigen::Index j = 0; j < m; ++j) {
      const double an = p.a[j][k].norm();
      xi = std::max(xi, nk * (1.0 + std::abs(p.b(j))) / (1.0 + an));
      eta = std::max(eta, an);
    }
    x[k] = xi * RMatrix::Identity(p.c[k].rows(), p.c[k].rows());
    s[k] = eta * RMatrix::Identity(p.c[k].rows(), p.c[k].rows());
  }

  RVector& z = res.z;
  std::vector<RMatrix> s_inv(nb), rd(nb);

  // Best iterate inside the stall tolerances; returned if the iterations
  // stall short of the targets.
  const double stall_gap = std::max(opt.accuracy, opt.stall_accuracy);
  CoreResult fallback;
  bool have_fallback = false;
  int fallback_iter = 0;
  auto finish = [&](CoreResult& r) -> CoreResult {
    if (r.status != SdpStatus::kOptimal && have_fallback) {
      fallback.status = SdpStatus::kOptimal;
      return fallback;
    }
    return r;
  };

  for (int it = 0; it < opt.max_iterations; ++it) {
    res.iterations = it;
    // Residuals.
    RVector rp = p.b;
    for (Eigen::Index j = 0; j < m; ++j) {
      for (size_t k = 0; k < nb; ++k) rp(j) -= frob_dot(p.a[j][k], x[k]);
    }
    double rd_norm2 = 0.0;
    double pobj = 0.0;
    double xs = 0.0;
    for (size_t k = 0; k < nb; ++k) {
      rd[k] = p.c[k] - s[k];
      for (Eigen::Index j = 0; j < m; ++j) rd[k] -= z(j) * p.a[j][k];
      rd_norm2 += rd[k].squaredNorm();
      pobj += frob_dot(p.c[k], x[k]);
      xs += frob_dot(x[k], s[k]);
    }
    const double dobj = p.b.dot(z);
    res.pres = rp.norm() / (1.0 + b_norm);
    res.dres = std::sqrt(rd_norm2) / (1.0 + c_norm);
    res.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double comp_gap = xs / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (std::max(res.gap, comp_gap) <= opt.accuracy &&
        res.pres <= opt.feasibility && res.dres <= opt.feasibility) {
      res.status = SdpStatus::kOptimal;
      return res;
    }
    if (std::max(res.gap, comp_gap) <= stall_gap &&
        std::max(res.pres, res.dres) <= opt.stall_feasibility &&
        (!have_fallback || std::max({res.gap, comp_gap, res.pres, res.dres}) <
                               std::max({fallback.gap, fallback.pres, fallback.dres}))) {
      fallback = res;
      have_fallback = true;
      fallback_iter = it;
    }
    if (have_fallback && it - fallback_iter >= 10) {
      fallback.status = SdpStatus::kOptimal;
      fallback.iterations = it;
      return fallback;
    }

    // Improving ray for the X problem certifies an empty LMI set.
    double x_norm = 0.0;
    for (size_t k = 0; k < nb; ++k) x_norm += x[k].squaredNorm();
    x_norm = std::sqrt(x_norm);
    if (x_norm > 1e10 && pobj / x_norm < -1e-8 &&
        (p.b - rp).norm() / x_norm < 1e-10) {
      res.status = SdpStatus::kInfeasible;
      return res;
    }

    const double mu = xs / n_total;

    // Nesterov-Todd scaling W with W S W = X, from X = L L^T and
    // L^T S L = U D U^T: W = L U D^-1/2 U^T L^T.
    std::vector<RMatrix> w(nb);
    bool ok = true;
    for (size_t k = 0; k < nb && ok; ++k) {
      if (x[k].rows() == 1) {
        const double xv = x[k](0, 0), sv = s[k](0, 0);
        if (!(xv > 0.0 && sv > 0.0)) {
          ok = false;
          break;
        }
        s_inv[k] = RMatrix::Constant(1, 1, 1.0 / sv);
        w[k] = RMatrix::Constant(1, 1, std::sqrt(xv / sv));
        continue;
      }
      Eigen::LLT<RMatrix> lx(x[k]);
      Eigen::LLT<RMatrix> ls(s[k]);
      if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) {
        ok = false;
        break;
      }
      s_inv[k] = ls.solve(RMatrix::Identity(s[k].rows(), s[k].cols()));
      s_inv[k] = (0.5 * (s_inv[k] + s_inv[k].transpose())).eval();
      const RMatrix l = lx.matrixL();
      const RMatrix lsl = l.transpose() * s[k] * l;
      Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (lsl + lsl.transpose()));
      if (es.info() != Eigen::Success || es.eigenvalues()(0) <= 0.0) {
        ok = false;
        break;
      }
      const RMatrix lu = l * es.eigenvectors();
      const RMatrix wk = lu * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                         lu.transpose();
      w[k] = 0.5 * (wk + wk.transpose());
    }
    if (!ok) return finish(res);

    // Schur complement M_ij = tr(A_i W A_j W).
    std::vector<std::vector<RMatrix>> awa(static_cast<size_t>(m), std::vector<RMatrix>(nb));
    for (Eigen::Index j = 0; j < m; ++j) {
      for (size_t k = 0; k < nb; ++k) awa[j][k] = w[k] * p.a[j][k] * w[k];
    }
    RMatrix schur = RMatrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i; j < m; ++j) {
        double acc = 0.0;
        for (size_t k = 0; k < nb; ++k) acc += frob_dot(p.a[i][k], awa[j][k]);
        schur(i, j) = acc;
        schur(j, i) = acc;
      }
    }
    Eigen::LDLT<RMatrix> ldlt(schur);
    if (ldlt.info() != Eigen::Success) return finish(res);

    // Solves dX + W dS W = R, A(dX) = rp, dS = rd - sum dz_j A_j.
    auto direction = [&](const std::vector<RMatrix>& rcs,
                         std::vector<RMatrix>& dx, RVector& dz,
                         std::vector<RMatrix>& ds) {
      std::vector<RMatrix> base(nb);
      for (size_t k = 0; k < nb; ++k) base[k] = rcs[k] - w[k] * rd[k] * w[k];
      RVector rhs = rp;
      for (Eigen::Index j = 0; j < m; ++j) {
        for (size_t k = 0; k < nb; ++k) rhs(j) -= frob_dot(p.a[j][k], base[k]);
      }
      dz = ldlt.solve(rhs);
      dx.resize(nb);
      ds.resize(nb);
      auto expand = [&]() {
        for (size_t k = 0; k < nb; ++k) {
          ds[k] = rd[k];
          for (Eigen::Index j = 0; j < m; ++j) ds[k] -= dz(j) * p.a[j][k];
          RMatrix t = rcs[k] - w[k] * ds[k] * w[k];
          dx[k] = 0.5 * (t + t.transpose());
        }
      };
      expand();
      // Iterative refinement against the exact primal equations A(dx) = rp.
      for (int pass = 0; pass < 2; ++pass) {
        RVector e = rp;
        for (Eigen::Index j = 0; j < m; ++j) {
          for (size_t k = 0; k < nb; ++k) e(j) -= frob_dot(p.a[j][k], dx[k]);
        }
        if (e.norm() <= 1e-13 * (1.0 + b_norm)) break;
        dz += ldlt.solve(e);
        expand();
      }
    };

    // Predictor.
    std::vector<RMatrix> rcs(nb);
    for (size_t k = 0; k < nb; ++k) rcs[k] = -x[k];
    std::vector<RMatrix> dxa, dsa;
    RVector dza;
    direction(rcs, dxa, dza, dsa);
    const double ap_aff = std::min(1.0, max_step(x, dxa));
    const double ad_aff = std::min(1.0, max_step(s, dsa));
    double mu_aff = 0.0;
    for (size_t k = 0; k < nb; ++k) {
      mu_aff += frob_dot(x[k] + ap_aff * dxa[k], s[k] + ad_aff * dsa[k]);
    }
    mu_aff /= n_total;
    double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);

    // Corrector.
    for (size_t k = 0; k < nb; ++k) {
      const RMatrix corr = dxa[k] * dsa[k] * s_inv[k];
      rcs[k] = sigma * mu * s_inv[k] - x[k] - 0.5 * (corr + corr.transpose());
    }
    std::vector<RMatrix> dx, ds;
    RVector dz;
    direction(rcs, dx, dz, ds);
    const double gamma = 0.9 + 0.09 * std::min(ap_aff, ad_aff);
    const double ap = std::min(1.0, gamma * max_step(x, dx));
    const double ad = std::min(1.0, gamma * max_step(s, ds));
    if (!(ap > 1e-14) && !(ad > 1e-14)) return finish(res);
    for (size_t k = 0; k < nb; ++k) {
      x[k] += ap * dx[k];
      s[k] += ad * ds[k];
      x[k] = (0.5 * (x[k] + x[k].transpose())).eval();
      s[k] = (0.5 * (s[k] + s[k].transpose())).eval();
    }
    z += ad * dz;
  }
  res.iterations = opt.max_iterations;
  return finish(res);
}

}  // namespace

// Lowers an SdpProblem to the real block form used by solve_core.
struct SdpCompiler {
  const SdpProblem& prob;
  std::vector<int> herm_offset;
  std::vector<int> scalar_offset;
  std::vector<std::vector<CMatrix>> bases;
  int ny = 0;

  explicit SdpCompiler(const SdpProblem& p) : prob(p) {
    for (int d : p.herm_dims_) {
      herm_offset.push_back(ny);
      ny += d * d;
      bases.push_back(hermitian_basis(d));
    }
    for (size_t i = 0; i < p.scalar_nonneg_.size(); ++i) {
      scalar_offset.push_back(ny);
      ny += 1;
    }
  }

  // Coefficients of a linear form over y, plus its constant.
  RVector linear_row(const LinearForm& f) const {
    RVector row = RVector::Zero(ny);
    for (const auto& [v, coef] : f.scalars) row(scalar_offset.at(v.id)) += coef;
    for (const auto& [v, c] : f.traces) {
      const auto& basis = bases.at(v.id);
      const int off = herm_offset.at(v.id);
      for (size_t i = 0; i < basis.size(); ++i) {
        row(off + static_cast<int>(i)) += re_trace_product(c, basis[i]);
      }
    }
    return row;
  }

  // Hermitian-valued form as constant + sum_i y_i F_i.
  std::vector<CMatrix> hermitian_terms(const HermitianForm& f,
                                       CMatrix& constant) const {
    const Eigen::Index n = f.constant.rows();
    constant = f.constant;
    std::vector<CMatrix> terms(static_cast<size_t>(ny), CMatrix::Zero(n, n));
    for (const auto& [v, c] : f.scalars) terms[scalar_offset.at(v.id)] += c;
    for (const auto& cg : f.congruences) {
      const auto& basis = bases.at(cg.var.id);
      const int off = herm_offset.at(cg.var.id);
      for (size_t i = 0; i < basis.size(); ++i) {
        terms[off + i] += cg.weight * cg.map * basis[i] * cg.map.adjoint();
      }
    }
    return terms;
  }

  void unpack(const RVector& y, std::vector<CMatrix>& herm,
              std::vector<double>& scal) const {
    herm.clear();
    scal.clear();
    for (size_t v = 0; v < prob.herm_dims_.size(); ++v) {
      const int d = prob.herm_dims_[v];
      CMatrix x = CMatrix::Zero(d, d);
      for (size_t i = 0; i < bases[v].size(); ++i) {
        x += y(herm_offset[v] + static_cast<int>(i)) * bases[v][i];
      }
      herm.push_back(x);
    }
    for (size_t v = 0; v < prob.scalar_nonneg_.size(); ++v) {
      scal.push_back(y(scalar_offset[v]));
    }
  }
};

HermVar SdpProblem::add_hermitian(int n, bool psd) {
  if (n < 1) throw InvalidInput("hermitian variable dimension must be >= 1");
  herm_dims_.push_back(n);
  herm_psd_.push_back(psd);
  return HermVar{static_cast<int>(herm_dims_.size()) - 1};
}

ScalarVar SdpProblem::add_scalar(bool nonnegative) {
  scalar_nonneg_.push_back(nonnegative);
  return ScalarVar{static_cast<int>(scalar_nonneg_.size()) - 1};
}

void SdpProblem::minimize(LinearForm objective) {
  objective_ = std::move(objective);
  minimize_ = true;
}

void SdpProblem::add_lmi(HermitianForm form) {
  const Eigen::Index n = form.constant.rows();
  for (const auto& [v, c] : form.scalars) {
    if (c.rows() != n || c.cols() != n) {
      throw InvalidInput("add_lmi: scalar coefficient has wrong shape");
    }
    (void)v;
  }
  for (const auto& cg : form.congruences) {
    if (cg.map.rows() != n || cg.map.cols() != hermitian_dim(cg.var)) {
      throw InvalidInput("add_lmi: congruence map has wrong shape");
    }
  }
  lmis_.push_back(std::move(form));
}

void SdpProblem::add_equality(LinearForm form) {
  equalities_.push_back(std::move(form));
}

void SdpProblem::add_inequality(LinearForm form) {
  inequalities_.push_back(std::move(form));
}

int SdpProblem::num_real_variables() const {
  int n = static_cast<int>(scalar_nonneg_.size());
  for (int d : herm_dims_) n += d * d;
  return n;
}

double SdpProblem::evaluate(const LinearForm& form,
                            const std::vector<CMatrix>& herm,
                            const std::vector<double>& scal) const {
  double v = form.constant;
  for (const auto& [s, coef] : form.scalars) v += coef * scal.at(s.id);
  for (const auto& [h, c] : form.traces) v += re_trace_product(c, herm.at(h.id));
  return v;
}

CMatrix SdpProblem::evaluate(const HermitianForm& form,
                             const std::vector<CMatrix>& herm,
                             const std::vector<double>& scal) const {
  CMatrix v = form.constant;
  for (const auto& [s, c] : form.scalars) v += scal.at(s.id) * c;
  for (const auto& cg : form.congruences) {
    v += cg.weight * cg.map * herm.at(cg.var.id) * cg.map.adjoint();
  }
  return v;
}

SdpSolution SdpProblem::solve(const SdpOptions& options) const {
  SdpCompiler comp(*this);
  const int ny = comp.ny;

  // Objective (always maximized internally).
  RVector cvec = comp.linear_row(objective_);
  if (minimize_) cvec = -cvec;

  // Equality elimination y = y0 + N z.
  RVector y0 = RVector::Zero(ny);
  RMatrix basis = RMatrix::Identity(ny, ny);
  if (!equalities_.empty()) {
    RMatrix e(equalities_.size(), ny);
    RVector f(equalities_.size());
    for (size_t i = 0; i < equalities_.size(); ++i) {
      e.row(i) = comp.linear_row(equalities_[i]).transpose();
      f(i) = -equalities_[i].constant;
    }
    Eigen::JacobiSVD<RMatrix> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RVector& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv.maxCoeff() : 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > 1e-12 * smax) ++rank;
    }
    svd.setThreshold(1e-12);
    y0 = svd.solve(f);
    if ((e * y0 - f).norm() > 1e-9 * (1.0 + f.norm())) {
      SdpSolution out;
      out.status = SdpStatus::kInfeasible;
      return out;
    }
    basis = svd.matrixV().rightCols(ny - rank);
  }
  const Eigen::Index nz = basis.cols();

  // Constraint blocks as constant + sum_i y_i F_i, real-embedded.
  std::vector<RMatrix> f0;
  std::vector<std::vector<RMatrix>> fi;  // fi[block][i]
  auto push_block = [&](const CMatrix& constant,
                        const std::vector<CMatrix>& terms) {
    f0.push_back(embed_hermitian(constant));
    std::vector<RMatrix> row;
    row.reserve(terms.size());
    for (const auto& t : terms) row.push_back(embed_hermitian(t));
    fi.push_back(std::move(row));
  };
  auto push_scalar_block = [&](double constant, const RVector& row) {
    f0.push_back(RMatrix::Constant(1, 1, constant));
    std::vector<RMatrix> r;
    r.reserve(static_cast<size_t>(ny));
    for (int i = 0; i < ny; ++i) r.push_back(RMatrix::Constant(1, 1, row(i)));
    fi.push_back(std::move(r));
  };

  for (size_t v = 0; v < herm_dims_.size(); ++v) {
    if (!herm_psd_[v]) continue;
    HermitianForm self(herm_dims_[v]);
    self.add(HermVar{static_cast<int>(v)},
             CMatrix::Identity(herm_dims_[v], herm_dims_[v]));
    CMatrix constant;
    auto terms = comp.hermitian_terms(self, constant);
    push_block(constant, terms);
  }
  for (const auto& lmi : lmis_) {
    CMatrix constant;
    auto terms = comp.hermitian_terms(lmi, constant);
    push_block(constant, terms);
  }
  for (size_t v = 0; v < scalar_nonneg_.size(); ++v) {
    if (!scalar_nonneg_[v]) continue;
    RVector row = RVector::Zero(ny);
    row(comp.scalar_offset[v]) = 1.0;
    push_scalar_block(0.0, row);
  }
  for (const auto& ineq : inequalities_) {
    push_scalar_block(ineq.constant, comp.linear_row(ineq));
  }

  // Reduced LMI data in z. Each block is scaled to unit coefficient norm
  // and then every A_j to unit norm. Columns that touch no constraint must
  // not move the objective.
  CoreSdp core;
  const size_t nblk = f0.size();
  core.c.resize(nblk);
  for (size_t k = 0; k < nblk; ++k) {
    core.c[k] = f0[k];
    for (int i = 0; i < ny; ++i) {
      if (y0(i) != 0.0) core.c[k] += y0(i) * fi[k][i];
    }
  }
  std::vector<std::vector<RMatrix>> reduced(static_cast<size_t>(nz));
  std::vector<double> block_norm(nblk, 0.0);
  for (Eigen::Index j = 0; j < nz; ++j) {
    auto& aj = reduced[static_cast<size_t>(j)];
    aj.resize(nblk);
    for (size_t k = 0; k < nblk; ++k) {
      aj[k] = RMatrix::Zero(f0[k].rows(), f0[k].cols());
      for (int i = 0; i < ny; ++i) {
        if (basis(i, j) != 0.0) aj[k] -= basis(i, j) * fi[k][i];
      }
      block_norm[k] = std::max(block_norm[k], aj[k].norm());
    }
  }
  for (size_t k = 0; k < nblk; ++k) {
    const double w = block_norm[k] > 1e-300 ? 1.0 / block_norm[k] : 1.0;
    core.c[k] *= w;
    for (auto& aj : reduced) aj[k] *= w;
  }
  std::vector<Eigen::Index> kept;
  std::vector<double> scale;
  for (Eigen::Index j = 0; j < nz; ++j) {
    auto& aj = reduced[static_cast<size_t>(j)];
    double nrm2 = 0.0;
    for (const auto& blk : aj) nrm2 += blk.squaredNorm();
    const double bj = basis.col(j).dot(cvec);
    const double nrm = std::sqrt(nrm2);
    if (nrm < 1e-14) {
      if (std::abs(bj) > 1e-12) {
        SdpSolution out;
        out.status = SdpStatus::kInfeasible;  // unbounded objective
        return out;
      }
      continue;
    }
    for (auto& blk : aj) blk /= nrm;
    core.a.push_back(std::move(aj));
    kept.push_back(j);
    scale.push_back(nrm);
  }
  core.b.resize(static_cast<Eigen::Index>(kept.size()));
  for (size_t jj = 0; jj < kept.size(); ++jj) {
    core.b(jj) = basis.col(kept[jj]).dot(cvec) / scale[jj];
  }
  const double b_norm = core.b.norm();
  if (b_norm > 0.0) core.b /= b_norm;

  SdpSolution out;
  CoreResult cr;
  if (nblk == 0 || kept.empty()) {
    cr.status = SdpStatus::kOptimal;
    cr.z = RVector::Zero(static_cast<Eigen::Index>(kept.size()));
  } else {
    cr = solve_core(core, options);
  }
  out.status = cr.status;
  out.iterations = cr.iterations;
  out.relative_gap = cr.gap;
  out.primal_residual = cr.dres;
  out.dual_residual = cr.pres;

  RVector y = y0;
  for (size_t jj = 0; jj < kept.size(); ++jj) {
    y += basis.col(kept[jj]) * (cr.z(jj) / scale[jj]);
  }
  comp.unpack(y, out.hermitian_values, out.scalar_values);
  out.value = evaluate(objective_, out.hermitian_values, out.scalar_values);
  return out;
}

SdpSolution solve_sdp(const SdpProblem& p, double accuracy) {
  SdpOptions opt;
  opt.accuracy = accuracy;
  return p.solve(opt);
}

}  // namespace wiretap
