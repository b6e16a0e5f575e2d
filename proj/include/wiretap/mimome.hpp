#pragma once

#include <vector>

#include "wiretap/channel.hpp"
#include "wiretap/convex.hpp"

namespace wiretap {

/// Auxiliary matrices of the variational lower bound: s0 (Nb x Nb) for the
/// legitimate interference-plus-noise term, s1 (Ne x Ne) for the
/// eavesdropper's.
struct VariationalState {
  CMatrix s0;
  CMatrix s1;
};

/// theta(S, Q) in nats:
///   ln|I + H1 Qa H1^H + G2 Qj G2^H| + ln|I + H2 Qj H2^H|
///   - tr(S0 (I + G2 Qj G2^H)) + ln|S0| + Nb
///   - tr(S1 (I + H2 Qj H2^H + G1 Qa G1^H)) + ln|S1| + Ne.
/// Returns -infinity when S0 or S1 is not positive definite.
double theta_objective(const WiretapChannel& ch, const VariationalState& s,
                       const CovariancePair& cov);

/// Closed-form maximizer over S for fixed Q: the inverses of the two
/// interference-plus-noise covariances. theta then equals ln 2 (Rd - Re).
VariationalState s_update(const WiretapChannel& ch, const CovariancePair& cov);

struct QUpdateResult {
  CovariancePair cov;
  double theta = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Maximizes theta over Q for fixed S under tr(Qa) + tr(Qj) <= P. The problem
/// is concave; `start` warm-starts the projected-gradient solver.
QUpdateResult q_update(const WiretapChannel& ch, const VariationalState& s,
                       double power, const CovariancePair& start,
                       const LogDetOptions& options = {});

enum class InitKind { kAlignment, kIsotropic };

/// Qa = Qj = (P/2) / N * I.
CovariancePair isotropic_init(const AntennaConfig& config, double power);

/// Equal-power alignment precoders; falls back to isotropic_init when d* = 0
/// or the realization is degenerate. `used_alignment` reports which one won.
CovariancePair alignment_init(const WiretapChannel& ch, double power,
                              bool* used_alignment = nullptr);

struct GaussSeidelOptions {
  /// Relative theta improvement below which the iteration stops.
  double tol = 1e-2;
  int max_iters = 100;
  InitKind init = InitKind::kAlignment;
  LogDetOptions inner{1e-9, 500, 1.0, 0.5, 1e-4};
};

struct GaussSeidelReport {
  SecrecyResult result;
  SecrecyResult initial;
  /// theta after the initial S-update and after every S-update that follows.
  std::vector<double> theta_trace;
  /// Secrecy rate in bits after each outer iteration (index 0 is the start).
  std::vector<double> rate_trace;
  /// |theta - ln 2 (Rd - Re)| after each S-update.
  std::vector<double> bridge_gaps;
  int iterations = 0;
  bool converged = false;
};

/// Alternates S- and Q-updates; theta is nondecreasing.
GaussSeidelReport gauss_seidel_solve(const WiretapChannel& ch, double power,
                                     const GaussSeidelOptions& options = {});

/// Convenience wrapper starting from a given covariance pair.
GaussSeidelReport gauss_seidel_solve_from(const WiretapChannel& ch, double power,
                                          const CovariancePair& start,
                                          const GaussSeidelOptions& options = {});

}  // namespace wiretap
