#include <algorithm>
#include <cmath>
#include <numeric>

#include "wiretap/convex.hpp"
#include "wiretap/errors.hpp"

namespace wiretap {

namespace {

CMatrix term_argument(const LogDetTerm& t, const std::vector<CMatrix>& q) {
  const Eigen::Index n = t.maps.front().second.rows();
  CMatrix arg = CMatrix::Identity(n, n);
  for (const auto& [b, a] : t.maps) arg += a * q[b] * a.adjoint();
  return arg;
}

// Projection of v onto {x >= 0, sum x <= budget}.
RVector project_capped_simplex(const RVector& v, double budget) {
  RVector x = v.cwiseMax(0.0);
  if (x.sum() <= budget) return x;
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    cumsum += u[i];
    const double t = (cumsum - budget) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

double inner(const std::vector<CMatrix>& a, const std::vector<CMatrix>& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    acc += (a[i].conjugate().cwiseProduct(b[i])).sum().real();
  }
  return acc;
}

}  // namespace

double LogDetProblem::objective(const std::vector<CMatrix>& q) const {
  double v = 0.0;
  for (const auto& t : terms) {
    if (t.maps.empty()) continue;
    v += t.weight * ln_det_hpd(term_argument(t, q));
  }
  for (size_t b = 0; b < linear.size() && b < q.size(); ++b) {
    if (linear[b].size() == 0) continue;
    v += (linear[b].transpose().cwiseProduct(q[b])).sum().real();
  }
  return v;
}

std::vector<CMatrix> LogDetProblem::gradient(const std::vector<CMatrix>& q) const {
  std::vector<CMatrix> g;
  g.reserve(block_dims.size());
  for (int d : block_dims) g.push_back(CMatrix::Zero(d, d));
  for (const auto& t : terms) {
    if (t.maps.empty()) continue;
    const CMatrix arg = term_argument(t, q);
    Eigen::LLT<CMatrix> llt(0.5 * (arg + arg.adjoint()));
    for (const auto& [b, a] : t.maps) {
      // d/dQ ln det(I + A Q A^H) = A^H (I + A Q A^H)^-1 A
      g[b] += t.weight * (a.adjoint() * llt.solve(a));
    }
  }
  for (size_t b = 0; b < linear.size() && b < g.size(); ++b) {
    if (linear[b].size() == 0) continue;
    g[b] += linear[b];
  }
  for (auto& gb : g) gb = (0.5 * (gb + gb.adjoint())).eval();
  return g;
}

std::vector<CMatrix> project_trace_budget(const std::vector<CMatrix>& q,
                                          double budget) {
  std::vector<HermitianEigen> eig;
  eig.reserve(q.size());
  Eigen::Index total = 0;
  for (const auto& qb : q) {
    eig.push_back(hermitian_eigen(qb));
    total += eig.back().values.size();
  }
  RVector stacked(total);
  Eigen::Index off = 0;
  for (const auto& e : eig) {
    stacked.segment(off, e.values.size()) = e.values;
    off += e.values.size();
  }
  const RVector proj = project_capped_simplex(stacked, budget);
  std::vector<CMatrix> out;
  out.reserve(q.size());
  off = 0;
  for (const auto& e : eig) {
    const Eigen::Index n = e.values.size();
    const RVector lam = proj.segment(off, n);
    off += n;
    CMatrix m = e.vectors * lam.asDiagonal() * e.vectors.adjoint();
    out.push_back(0.5 * (m + m.adjoint()));
  }
  return out;
}

LogDetSolution solve_logdet_max(const LogDetProblem& p,
                                std::vector<CMatrix> start,
                                const LogDetOptions& opt) {
  if (!(p.budget >= 0.0)) throw InvalidInput("logdet: budget must be >= 0");
  for (const auto& t : p.terms) {
    if (t.weight < 0.0) throw InvalidInput("logdet: negative term weight");
    for (const auto& [b, a] : t.maps) {
      if (b < 0 || b >= static_cast<int>(p.block_dims.size()) ||
          a.cols() != p.block_dims[b] ||
          a.rows() != t.maps.front().second.rows()) {
        throw InvalidInput("logdet: map shape does not match its block");
      }
    }
  }
  if (start.empty()) {
    for (int d : p.block_dims) start.push_back(CMatrix::Zero(d, d));
  }
  if (start.size() != p.block_dims.size()) {
    throw InvalidInput("logdet: start has wrong number of blocks");
  }

  LogDetSolution sol;
  sol.blocks = project_trace_budget(start, p.budget);
  sol.value = p.objective(sol.blocks);
  sol.trace.push_back(sol.value);

  double last_step = opt.initial_step;
  for (int it = 0; it < opt.max_iterations; ++it) {
    sol.iterations = it + 1;
    const auto grad = p.gradient(sol.blocks);
    double step = std::max(opt.initial_step, 2.0 * last_step);
    bool accepted = false;
    std::vector<CMatrix> cand;
    double cand_value = sol.value;
    while (step > 1e-14 * std::max(1.0, p.budget)) {
      std::vector<CMatrix> moved(sol.blocks.size());
      for (size_t b = 0; b < moved.size(); ++b) {
        moved[b] = sol.blocks[b] + step * grad[b];
      }
      cand = project_trace_budget(moved, p.budget);
      std::vector<CMatrix> diff(cand.size());
      for (size_t b = 0; b < cand.size(); ++b) diff[b] = cand[b] - sol.blocks[b];
      const double predicted = inner(grad, diff);
      if (predicted <= 0.0) break;  // projected gradient vanished
      cand_value = p.objective(cand);
      if (cand_value >= sol.value + opt.armijo * predicted) {
        accepted = true;
        break;
      }
      step *= opt.backtrack;
    }
    if (!accepted) {
      sol.converged = true;
      break;
    }
    last_step = step;
    const double change = cand_value - sol.value;
    sol.blocks = std::move(cand);
    sol.value = cand_value;
    sol.trace.push_back(sol.value);
    if (change <= opt.tol * std::max(1.0, std::abs(sol.value))) {
      sol.converged = true;
      break;
    }
  }
  return sol;
}

}  // namespace wiretap
