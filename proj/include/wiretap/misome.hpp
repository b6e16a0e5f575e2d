#pragma once

#include <vector>

#include "wiretap/channel.hpp"
#include "wiretap/convex.hpp"
#include "wiretap/sdof.hpp"

namespace wiretap {

/// Outer search over the eavesdropper SINR bound tau.
struct TwoLayerConfig {
  /// tau = 0 plus (grid_points - 1) log-spaced values up to P |h1|^2 (>= 2).
  int grid_points = 200;
  /// Golden-section steps inside the best grid cell.
  int refinement_iterations = 40;
  /// Eigenvalue ratio below which the relaxed solution is taken as rank one.
  double rank_one_threshold = 1e-6;
  /// Lowest grid point relative to the upper bound (log spacing).
  double grid_floor = 1e-6;
  SdpOptions sdp{1e-9, 1e-9, 100};

  void validate() const;
};

/// Optimum of the Charnes-Cooper-transformed relaxation at a fixed tau.
struct CharnesCooperSolution {
  CMatrix q_tilde_a;
  CMatrix q_tilde_j;
  double xi = 1.0;
  double f_tau = 0.0;
  double tau = 0.0;
  SdpStatus status = SdpStatus::kOptimal;
  int iterations = 0;

  /// (q_tilde_a / xi, q_tilde_j / xi), PSD-clipped.
  CovariancePair descaled() const;
};

/// f(tau) = max h1 Qa h1^H / (1 + g2 Qj g2^H) subject to
/// G1 Qa G1^H <= tau (I + H2 Qj H2^H) and tr(Qa + Qj) <= P, solved as the
/// linear SDP in (Qa~, Qj~, xi). tau = 0 is evaluated in closed form (the
/// message must lie in null(G1)). Requires Nb = 1.
CharnesCooperSolution inner_sdp_f_tau(const WiretapChannel& ch, double power,
                                      double tau, const SdpOptions& opt = {1e-9, 1e-9, 100});

struct RankOneResult {
  CovariancePair cov;
  /// lambda_2 / lambda_1 of cov.qa.
  double eigen_ratio = 0.0;
  /// h1 Qa h1^H / (1 + g2 Qj g2^H) at cov.
  double achieved_f = 0.0;
  /// True when the power-minimization SDP failed and the principal
  /// eigenvector of the relaxed solution was used instead.
  bool fallback = false;
};

/// Minimum total power reaching f_tau under the tau LMI; its Qa is rank one
/// whenever the secrecy rate is positive. `relaxed` is the Charnes-Cooper
/// solution used for the fallback path.
RankOneResult power_min_rank_one(const WiretapChannel& ch, double tau,
                                 double f_tau,
                                 const CharnesCooperSolution& relaxed,
                                 const SdpOptions& opt = {1e-9, 1e-9, 100});

/// Eigenvalue ratio lambda_2 / lambda_1 of a PSD matrix (0 for rank <= 1).
double second_to_first_eigen_ratio(const CMatrix& q);

struct MisomeCapacity {
  SecrecyResult result;
  double tau_star = 0.0;
  double f_tau_star = 0.0;
  /// log2(1 + f(tau*)) - log2(1 + tau*).
  double surrogate_bits = 0.0;
  double eigen_ratio = 0.0;
  bool refined = false;
  /// Every (tau, surrogate bits) pair evaluated by the search.
  std::vector<std::pair<double, double>> evaluations;
};

/// Secrecy capacity of the Nb = 1 channel: grid + golden-section search over
/// tau with an SDP at each point, then rank-one recovery. Throws
/// SolverFailure if every inner solve fails.
MisomeCapacity misome_secrecy_capacity_report(const WiretapChannel& ch,
                                              double power,
                                              const TwoLayerConfig& cfg = {});
SecrecyResult misome_secrecy_capacity(const WiretapChannel& ch, double power,
                                      const TwoLayerConfig& cfg = {});

/// Optimal power split for the alignment beams, given the three gains
/// a = |h1 v|^2, b = |G1 v|^2, c = |H2 gamma w|^2.
struct AlignmentClosedForm {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double power = 0.0;
  double x_star = 0.0;
  double eta_max = 1.0;
  double cs_sub = 0.0;
  double y0 = 0.0;
  double kappa = 0.0;
  double big_a = 0.0;
  double big_b = 0.0;
  /// y0 lies inside [1 + min(b,c) P, 1 + max(b,c) P].
  bool interior = false;
  /// |b - c| was too small for the closed form; a dense grid was used.
  bool grid_fallback = false;
};

/// eta(x) = (1 + a x)(1 + c(P - x)) / (1 + cP + (b - c) x).
double alignment_eta(double a, double b, double c, double power, double x);

/// Maximizes eta over [0, P] in closed form.
AlignmentClosedForm solve_alignment_power(double a, double b, double c,
                                          double power);

struct MisoAlignment {
  MisoDirections directions;
  AlignmentClosedForm closed_form;
  /// Qa = x* v v^H, Qj = (P - x*) (gamma w)(gamma w)^H.
  CovariancePair cov;
};

/// Throws Infeasible when Ne >= Na + Nj - 1.
MisoAlignment alignment_closed_form(const WiretapChannel& ch, double power);

/// Matched-filter source beam with jamming spread isotropically over null(g2);
/// message/jamming split chosen by a dense 1-D search. With Nj = 1 the helper
/// stays silent.
SecrecyResult zf_baseline(const WiretapChannel& ch, double power);

}  // namespace wiretap
