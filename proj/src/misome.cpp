#include "wiretap/misome.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wiretap/errors.hpp"

namespace wiretap {

namespace {

// Nearest PSD matrix; solver output may sit outside the cone by its tolerance.
CMatrix project_psd(const CMatrix& q) {
  if (q.rows() == 0) return q;
  const HermitianEigen eig = hermitian_eigen(q);
  return eig.vectors * eig.values.cwiseMax(0.0).asDiagonal() * eig.vectors.adjoint();
}

void require_miso(const WiretapChannel& ch, double power) {
  ch.validate();
  if (ch.config.nb != 1)
    throw InvalidInput("single-antenna receiver solver needs nb = 1, got " +
                       ch.config.to_string());
  if (!(power > 0.0) || !std::isfinite(power))
    throw InvalidInput("power must be positive and finite");
}

double surrogate_bits(double f, double tau) {
  return std::log2(1.0 + f) - std::log2(1.0 + tau);
}

double ratio_f(const WiretapChannel& ch, const CovariancePair& cov) {
  double num = (ch.h1 * cov.qa * ch.h1.adjoint())(0, 0).real();
  double den = 1.0 + (ch.g2 * cov.qj * ch.g2.adjoint())(0, 0).real();
  return num / den;
}

CharnesCooperSolution tau_zero_solution(const WiretapChannel& ch, double power) {
  const int na = ch.config.na;
  const int nj = ch.config.nj;
  CharnesCooperSolution out;
  out.tau = 0.0;
  out.xi = 1.0;
  out.q_tilde_j = CMatrix::Zero(nj, nj);
  out.q_tilde_a = CMatrix::Zero(na, na);
  CMatrix n = null_space_basis(ch.g1);
  if (n.cols() > 0) {
    CVector u = n * (n.adjoint() * ch.h1.adjoint());
    double nrm2 = u.squaredNorm();
    if (nrm2 > 0.0) {
      out.q_tilde_a = power * (u * u.adjoint()) / nrm2;
      out.f_tau = power * nrm2;
    }
  }
  return out;
}

}  // namespace

void TwoLayerConfig::validate() const {
  if (grid_points < 2) throw InvalidInput("grid_points must be at least 2");
  if (refinement_iterations < 0)
    throw InvalidInput("refinement_iterations must be nonnegative");
  if (!(rank_one_threshold > 0.0 && rank_one_threshold < 1.0))
    throw InvalidInput("rank_one_threshold must lie in (0, 1)");
  if (!(grid_floor > 0.0 && grid_floor < 1.0))
    throw InvalidInput("grid_floor must lie in (0, 1)");
}

CovariancePair CharnesCooperSolution::descaled() const {
  CovariancePair c;
  c.qa = project_psd(q_tilde_a / xi);
  c.qj = project_psd(q_tilde_j / xi);
  return c;
}

double second_to_first_eigen_ratio(const CMatrix& q) {
  if (q.rows() < 2) return 0.0;
  HermitianEigen e = hermitian_eigen(q);
  const Eigen::Index n = e.values.size();
  double l1 = e.values(n - 1);
  if (l1 <= 0.0) return 0.0;
  return std::max(e.values(n - 2), 0.0) / l1;
}

CharnesCooperSolution inner_sdp_f_tau(const WiretapChannel& ch, double power,
                                      double tau, const SdpOptions& opt) {
  require_miso(ch, power);
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidInput("tau must be nonnegative");
  if (tau == 0.0) return tau_zero_solution(ch, power);

  const int na = ch.config.na;
  const int nj = ch.config.nj;
  const int ne = ch.config.ne;

  // Solved in units of the power budget: Q~ = P Y with channels scaled by sqrt(P).
  const double sp = std::sqrt(power);
  const CMatrix h1 = sp * ch.h1, g1 = sp * ch.g1, h2 = sp * ch.h2, g2 = sp * ch.g2;

  SdpProblem p;
  HermVar qa = p.add_hermitian(na);
  HermVar qj = p.add_hermitian(nj);
  ScalarVar xi = p.add_scalar(true);

  p.maximize(LinearForm{}.add(qa, h1.adjoint() * h1));
  p.add_equality(LinearForm{}.add(xi, 1.0).add(qj, g2.adjoint() * g2).add(-1.0));

  HermitianForm lmi(ne);
  lmi.add(xi, tau * CMatrix::Identity(ne, ne));
  lmi.add(qj, h2, tau);
  lmi.add(qa, g1, -1.0);
  p.add_lmi(std::move(lmi));

  p.add_inequality(LinearForm{}
                       .add(xi, 1.0)
                       .add(qa, -CMatrix::Identity(na, na))
                       .add(qj, -CMatrix::Identity(nj, nj)));

  SdpSolution s = p.solve(opt);
  CharnesCooperSolution out;
  out.tau = tau;
  out.status = s.status;
  out.iterations = s.iterations;
  if (s.status != SdpStatus::kOptimal) return out;
  out.q_tilde_a = power * s[qa];
  out.q_tilde_j = power * s[qj];
  out.xi = s[xi];
  out.f_tau = std::max(s.value, 0.0);
  if (!(out.xi > 0.0)) out.status = SdpStatus::kNumericalFailure;
  return out;
}

RankOneResult power_min_rank_one(const WiretapChannel& ch, double tau, double f_tau,
                                 const CharnesCooperSolution& relaxed,
                                 const SdpOptions& opt) {
  ch.validate();
  const int na = ch.config.na;
  const int nj = ch.config.nj;
  const int ne = ch.config.ne;
  RankOneResult out;

  bool solved = false;
  if (f_tau > 0.0 && tau > 0.0) {
    const CovariancePair r = relaxed.descaled();
    const double unit = std::max(r.qa.trace().real() + r.qj.trace().real(), 1e-12);
    const double su = std::sqrt(unit);
    const CMatrix h1 = su * ch.h1, g1 = su * ch.g1, h2 = su * ch.h2, g2 = su * ch.g2;

    SdpProblem p;
    HermVar qa = p.add_hermitian(na);
    HermVar qj = p.add_hermitian(nj);
    p.minimize(LinearForm{}
                   .add(qa, CMatrix::Identity(na, na))
                   .add(qj, CMatrix::Identity(nj, nj)));
    p.add_inequality(LinearForm{}
                         .add(qa, h1.adjoint() * h1)
                         .add(qj, -f_tau * (g2.adjoint() * g2))
                         .add(-f_tau));
    HermitianForm lmi(ne);
    lmi.constant = tau * CMatrix::Identity(ne, ne);
    lmi.add(qj, h2, tau);
    lmi.add(qa, g1, -1.0);
    p.add_lmi(std::move(lmi));
    SdpSolution s = p.solve(opt);
    if (s.status == SdpStatus::kOptimal) {
      out.cov.qa = project_psd(unit * s[qa]);
      out.cov.qj = project_psd(unit * s[qj]);
      solved = true;
    }
  }

  if (!solved) {
    out.fallback = f_tau > 0.0 && tau > 0.0;
    CovariancePair c = relaxed.descaled();
    HermitianEigen e = hermitian_eigen(c.qa);
    const Eigen::Index n = e.values.size();
    CVector u = e.vectors.col(n - 1);
    out.cov.qa = c.qa.trace().real() * (u * u.adjoint());
    out.cov.qj = c.qj;
  }
  out.eigen_ratio = second_to_first_eigen_ratio(out.cov.qa);
  out.achieved_f = ratio_f(ch, out.cov);
  return out;
}

MisomeCapacity misome_secrecy_capacity_report(const WiretapChannel& ch, double power,
                                              const TwoLayerConfig& cfg) {
  require_miso(ch, power);
  cfg.validate();

  const double tau_ub = power * ch.h1.squaredNorm();
  MisomeCapacity rep;
  std::vector<CharnesCooperSolution> sols;
  int total_iterations = 0;
  int failures = 0;

  auto eval = [&](double tau) -> double {
    CharnesCooperSolution s = inner_sdp_f_tau(ch, power, tau, cfg.sdp);
    total_iterations += s.iterations;
    double v = -std::numeric_limits<double>::infinity();
    if (s.status == SdpStatus::kOptimal) {
      v = surrogate_bits(s.f_tau, tau);
      rep.evaluations.emplace_back(tau, v);
      sols.push_back(std::move(s));
    } else {
      ++failures;
    }
    return v;
  };

  std::vector<double> grid(cfg.grid_points);
  grid[0] = 0.0;
  const double lo = std::log10(cfg.grid_floor);
  for (int i = 1; i < cfg.grid_points; ++i) {
    double t = cfg.grid_points == 2 ? 0.0 : lo * (1.0 - double(i - 1) / double(cfg.grid_points - 2));
    grid[i] = tau_ub * std::pow(10.0, t);
  }
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = eval(grid[i]);

  std::size_t best = std::max_element(vals.begin(), vals.end()) - vals.begin();
  if (!std::isfinite(vals[best]))
    throw SolverFailure("every inner SDP failed for " + ch.config.to_string());

  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[std::min(best + 1, grid.size() - 1)];
  if (b > a) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = eval(x1), f2 = eval(x2);
    for (int it = 0; it < cfg.refinement_iterations; ++it) {
      if (f1 >= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - phi * (b - a);
        f1 = eval(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + phi * (b - a);
        f2 = eval(x2);
      }
    }
  }

  std::size_t ibest = 0;
  for (std::size_t i = 1; i < sols.size(); ++i) {
    if (surrogate_bits(sols[i].f_tau, sols[i].tau) >
        surrogate_bits(sols[ibest].f_tau, sols[ibest].tau))
      ibest = i;
  }
  const CharnesCooperSolution& star = sols[ibest];
  rep.tau_star = star.tau;
  rep.f_tau_star = star.f_tau;
  rep.surrogate_bits = surrogate_bits(star.f_tau, star.tau);

  CovariancePair cov = star.descaled();
  double ratio = second_to_first_eigen_ratio(cov.qa);
  std::vector<std::string> flags;
  if (ratio > cfg.rank_one_threshold) {
    RankOneResult r = power_min_rank_one(ch, star.tau, star.f_tau, star, cfg.sdp);
    rep.refined = true;
    if (r.fallback) flags.push_back("rank-one-fallback");
    cov = r.cov;
    ratio = r.eigen_ratio;
  }
  const double used = cov.total_power();
  if (used > power) {
    cov.qa *= power / used;
    cov.qj *= power / used;
  }
  rep.eigen_ratio = ratio;

  rep.result = evaluate(ch, cov);
  SolverDiagnostics& d = rep.result.diagnostics;
  d.iterations = total_iterations;
  for (auto& e : rep.evaluations) d.objective_trace.push_back(e.second);
  for (auto& f : flags) d.flags.push_back(f);
  if (failures > 0) d.flags.push_back("inner-failures=" + std::to_string(failures));
  return rep;
}

SecrecyResult misome_secrecy_capacity(const WiretapChannel& ch, double power,
                                      const TwoLayerConfig& cfg) {
  return misome_secrecy_capacity_report(ch, power, cfg).result;
}

double alignment_eta(double a, double b, double c, double power, double x) {
  return (1.0 + a * x) * (1.0 + c * (power - x)) / (1.0 + c * power + (b - c) * x);
}

AlignmentClosedForm solve_alignment_power(double a, double b, double c, double power) {
  if (!(a >= 0.0 && b >= 0.0 && c >= 0.0) || !(power > 0.0))
    throw InvalidInput("alignment gains must be nonnegative and power positive");
  AlignmentClosedForm out;
  out.a = a;
  out.b = b;
  out.c = c;
  out.power = power;

  auto pick = [&](double x) {
    double eta = alignment_eta(a, b, c, power, x);
    if (eta > out.eta_max) {
      out.eta_max = eta;
      out.x_star = x;
    }
  };
  out.eta_max = alignment_eta(a, b, c, power, 0.0);
  out.x_star = 0.0;
  pick(power);

  const double scale = std::max({b, c, std::numeric_limits<double>::min()});
  if (std::abs(b - c) < 1e-8 * scale) {
    out.grid_fallback = true;
    const int n = 20000;
    for (int i = 1; i < n; ++i) pick(power * double(i) / n);
    double lo = std::max(0.0, out.x_star - power / n);
    double hi = std::min(power, out.x_star + power / n);
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 80; ++it) {
      double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
      if (alignment_eta(a, b, c, power, x1) >= alignment_eta(a, b, c, power, x2))
        hi = x2;
      else
        lo = x1;
    }
    pick(0.5 * (lo + hi));
  } else {
    // With y = 1 + cP + (b - c) x the objective is kappa - A y - B / y.
    const double d = b - c;
    const double m = d - a * (1.0 + c * power);
    const double n = b * (1.0 + c * power);
    out.kappa = (a * n - m * c) / (d * d);
    out.big_a = a * c / (d * d);
    out.big_b = -m * n / (d * d);
    const double y1 = 1.0 + std::min(b, c) * power;
    const double y2 = 1.0 + std::max(b, c) * power;
    if (out.big_a > 0.0 && out.big_b > 0.0) {
      out.y0 = std::sqrt(out.big_b / out.big_a);
      if (out.y0 >= y1 && out.y0 <= y2) {
        out.interior = true;
        double eta = out.kappa - 2.0 * std::sqrt(out.big_a * out.big_b);
        if (eta > out.eta_max) {
          out.eta_max = eta;
          out.x_star = std::clamp((out.y0 - 1.0 - c * power) / d, 0.0, power);
        }
      }
    }
  }
  out.cs_sub = std::max(std::log2(out.eta_max), 0.0);
  return out;
}

MisoAlignment alignment_closed_form(const WiretapChannel& ch, double power) {
  require_miso(ch, power);
  MisoAlignment out;
  out.directions = misome_alignment_directions(ch);
  const CVector& v = out.directions.v_o;
  CVector w = out.directions.helper_beam();
  double a = (ch.h1 * v).squaredNorm();
  double b = (ch.g1 * v).squaredNorm();
  double c = (ch.h2 * w).squaredNorm();
  out.closed_form = solve_alignment_power(a, b, c, power);
  double x = out.closed_form.x_star;
  out.cov.qa = x * (v * v.adjoint()) / v.squaredNorm();
  out.cov.qj = (power - x) * (w * w.adjoint()) / w.squaredNorm();
  return out;
}

SecrecyResult zf_baseline(const WiretapChannel& ch, double power) {
  require_miso(ch, power);
  const int nj = ch.config.nj;
  double hn = ch.h1.norm();
  if (hn == 0.0) throw DegenerateChannel("h1 is zero");
  CVector v = ch.h1.adjoint() / hn;
  CMatrix vv = v * v.adjoint();
  CMatrix jam = CMatrix::Zero(nj, nj);
  if (nj >= 2) {
    CMatrix gamma = null_space_basis(ch.g2);
    if (gamma.cols() > 0) jam = gamma * gamma.adjoint() / double(gamma.cols());
  }
  const bool jamming = jam.squaredNorm() > 0.0;

  auto at = [&](double x) {
    CovariancePair c;
    c.qa = x * vv;
    c.qj = jamming ? CMatrix((power - x) * jam) : CMatrix::Zero(nj, nj);
    return c;
  };
  auto score = [&](double x) { return secrecy_rate(ch, at(x)); };

  const int n = 2000;
  double best_x = 0.0, best = score(0.0);
  for (int i = 1; i <= n; ++i) {
    double x = power * double(i) / n;
    double s = score(x);
    if (s > best) {
      best = s;
      best_x = x;
    }
  }
  double lo = std::max(0.0, best_x - power / n), hi = std::min(power, best_x + power / n);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 60; ++it) {
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    if (score(x1) >= score(x2))
      hi = x2;
    else
      lo = x1;
  }
  double xr = 0.5 * (lo + hi);
  if (score(xr) > best) best_x = xr;

  SecrecyResult r = evaluate(ch, at(best_x));
  r.diagnostics.iterations = n + 60;
  if (!jamming) r.diagnostics.flags.push_back("no-jamming");
  return r;
}

}  // namespace wiretap
