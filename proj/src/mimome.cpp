#include "wiretap/mimome.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wiretap/errors.hpp"
#include "wiretap/sdof.hpp"

namespace wiretap {

namespace {

CMatrix eye(Eigen::Index n) { return CMatrix::Identity(n, n); }

double ln_det_pd_or_neg_inf(const CMatrix& s) {
  HermitianEigen e = hermitian_eigen(0.5 * (s + s.adjoint()));
  if (e.values.size() == 0) return 0.0;
  if (!(e.values.minCoeff() > 0.0)) return -std::numeric_limits<double>::infinity();
  return e.values.array().log().sum();
}

CMatrix hermitian_inverse(const CMatrix& m) {
  CMatrix inv = m.llt().solve(eye(m.rows()));
  return 0.5 * (inv + inv.adjoint());
}

}  // namespace

double theta_objective(const WiretapChannel& ch, const VariationalState& s,
                       const CovariancePair& cov) {
  const auto nb = ch.config.nb, ne = ch.config.ne;
  double l0 = ln_det_pd_or_neg_inf(s.s0);
  double l1 = ln_det_pd_or_neg_inf(s.s1);
  if (!std::isfinite(l0) || !std::isfinite(l1))
    return -std::numeric_limits<double>::infinity();
  CMatrix hj = ch.h2 * cov.qj * ch.h2.adjoint();
  CMatrix gj = ch.g2 * cov.qj * ch.g2.adjoint();
  double omega = ln_det_hpd(eye(nb) + ch.h1 * cov.qa * ch.h1.adjoint() + gj) +
                 ln_det_hpd(eye(ne) + hj);
  double phi_b = -(s.s0 * (eye(nb) + gj)).trace().real() + l0 + nb;
  double phi_e =
      -(s.s1 * (eye(ne) + hj + ch.g1 * cov.qa * ch.g1.adjoint())).trace().real() + l1 + ne;
  return omega + phi_b + phi_e;
}

VariationalState s_update(const WiretapChannel& ch, const CovariancePair& cov) {
  const auto nb = ch.config.nb, ne = ch.config.ne;
  VariationalState s;
  s.s0 = hermitian_inverse(eye(nb) + ch.g2 * cov.qj * ch.g2.adjoint());
  s.s1 = hermitian_inverse(eye(ne) + ch.h2 * cov.qj * ch.h2.adjoint() +
                           ch.g1 * cov.qa * ch.g1.adjoint());
  return s;
}

QUpdateResult q_update(const WiretapChannel& ch, const VariationalState& s,
                       double power, const CovariancePair& start,
                       const LogDetOptions& options) {
  ch.validate();
  if (!(power > 0.0) || !std::isfinite(power)) throw InvalidInput("power must be positive");
  LogDetProblem p;
  p.block_dims = {ch.config.na, ch.config.nj};
  p.budget = power;
  p.terms.push_back({1.0, {{0, ch.h1}, {1, ch.g2}}});
  p.terms.push_back({1.0, {{1, ch.h2}}});
  p.linear = {-(ch.g1.adjoint() * s.s1 * ch.g1),
              -(ch.g2.adjoint() * s.s0 * ch.g2) - ch.h2.adjoint() * s.s1 * ch.h2};
  LogDetSolution sol = solve_logdet_max(p, {start.qa, start.qj}, options);
  QUpdateResult out;
  out.cov.qa = sol.blocks[0];
  out.cov.qj = sol.blocks[1];
  out.theta = theta_objective(ch, s, out.cov);
  out.iterations = sol.iterations;
  out.converged = sol.converged;
  return out;
}

CovariancePair isotropic_init(const AntennaConfig& config, double power) {
  config.validate();
  CovariancePair c;
  c.qa = (0.5 * power / config.na) * eye(config.na);
  c.qj = (0.5 * power / config.nj) * eye(config.nj);
  return c;
}

CovariancePair alignment_init(const WiretapChannel& ch, double power,
                              bool* used_alignment) {
  if (used_alignment) *used_alignment = false;
  if (sdof_closed_form(ch.config).d_star == 0) return isotropic_init(ch.config, power);
  try {
    PrecoderPair pair = alignment_precoders(ch);
    if (used_alignment) *used_alignment = true;
    return equal_power_covariances(pair, power);
  } catch (const DegenerateChannel&) {
    return isotropic_init(ch.config, power);
  }
}

GaussSeidelReport gauss_seidel_solve_from(const WiretapChannel& ch, double power,
                                          const CovariancePair& start,
                                          const GaussSeidelOptions& options) {
  ch.validate();
  if (!(power > 0.0) || !std::isfinite(power)) throw InvalidInput("power must be positive");
  CovariancePair cov = validate_covariances(ch, start, power);

  GaussSeidelReport rep;
  rep.initial = evaluate(ch, cov);
  auto record = [&](const VariationalState& s) {
    double th = theta_objective(ch, s, cov);
    SecrecyResult r = evaluate(ch, cov);
    double raw = rate_legitimate(ch, cov) - rate_eavesdropper(ch, cov);
    rep.theta_trace.push_back(th);
    rep.rate_trace.push_back(r.cs);
    rep.bridge_gaps.push_back(std::abs(th - std::log(2.0) * raw));
    return th;
  };

  VariationalState s = s_update(ch, cov);
  double prev = record(s);

  if (std::isfinite(options.tol) && options.max_iters > 0) {
    for (int it = 1; it <= options.max_iters; ++it) {
      QUpdateResult q = q_update(ch, s, power, cov, options.inner);
      // The projected-gradient step never lowers theta; guard against a
      // stalled solve that returned a worse point through round-off.
      if (q.theta >= theta_objective(ch, s, cov)) cov = q.cov;
      s = s_update(ch, cov);
      double th = record(s);
      rep.iterations = it;
      double denom = std::max({std::abs(prev), std::abs(th), 1e-12});
      double improvement = (th - prev) / denom;
      prev = th;
      if (improvement < options.tol) {
        rep.converged = true;
        break;
      }
    }
  }

  rep.result = evaluate(ch, cov);
  SolverDiagnostics& d = rep.result.diagnostics;
  d.iterations = rep.iterations;
  d.objective_trace = rep.theta_trace;
  if (!rep.converged && std::isfinite(options.tol) && options.max_iters > 0)
    d.status = "max-iterations";
  return rep;
}

GaussSeidelReport gauss_seidel_solve(const WiretapChannel& ch, double power,
                                     const GaussSeidelOptions& options) {
  ch.validate();
  CovariancePair start;
  bool aligned = false;
  if (options.init == InitKind::kAlignment)
    start = alignment_init(ch, power, &aligned);
  else
    start = isotropic_init(ch.config, power);
  GaussSeidelReport rep = gauss_seidel_solve_from(ch, power, start, options);
  if (options.init == InitKind::kAlignment && !aligned)
    rep.result.diagnostics.flags.push_back("isotropic-fallback");
  return rep;
}

}  // namespace wiretap
