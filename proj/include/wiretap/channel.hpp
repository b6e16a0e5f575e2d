#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wiretap/linalg.hpp"

namespace wiretap {

/// Antenna counts at the source (a), legitimate receiver (b), eavesdropper (e)
/// and helper (j).
struct AntennaConfig {
  int na = 1;
  int nb = 1;
  int ne = 1;
  int nj = 1;

  void validate() const;
  std::string to_string() const;
  friend bool operator==(const AntennaConfig&, const AntennaConfig&) = default;
};

/// Flat-fading channel matrices of the helper-assisted wiretap channel:
///   y_b = h1 V x + g2 W z + n_b,   y_e = g1 V x + h2 W z + n_e.
struct WiretapChannel {
  CMatrix h1;  // nb x na, source -> legitimate receiver
  CMatrix g1;  // ne x na, source -> eavesdropper
  CMatrix g2;  // nb x nj, helper -> legitimate receiver
  CMatrix h2;  // ne x nj, helper -> eavesdropper
  AntennaConfig config;

  /// Throws InvalidInput if any shape disagrees with `config`.
  void validate() const;
};

/// Builds a channel from its four matrices, inferring and checking the config.
WiretapChannel make_channel(CMatrix h1, CMatrix g1, CMatrix g2, CMatrix h2);

/// Transmit covariances of the source (qa) and helper (qj).
struct CovariancePair {
  CMatrix qa;
  CMatrix qj;

  double total_power() const;
};

/// Solver metadata attached to every result.
struct SolverDiagnostics {
  int iterations = 0;
  std::string status = "ok";
  std::vector<double> objective_trace;
  std::vector<std::string> flags;
};

/// Rates in bits per channel use.
struct SecrecyResult {
  double rd = 0.0;
  double re = 0.0;
  double cs = 0.0;
  CovariancePair covariances;
  SolverDiagnostics diagnostics;
};

/// Entries i.i.d. CN(0,1) (real and imaginary parts N(0, 1/2)); the same
/// (config, seed) always gives the same matrices.
WiretapChannel sample_channel(const AntennaConfig& config, std::uint64_t seed);

/// PSD check with tolerance `-1e-9 * trace` on the smallest eigenvalue.
/// Returns the hermitian part with small negative eigenvalues clipped to 0.
/// Throws InvalidInput when the matrix is not square or clearly indefinite.
CMatrix clip_psd(const CMatrix& q, const char* what);

/// Validates shapes and positive semidefiniteness; returns clipped copies.
/// When `budget` is positive also enforces tr(qa)+tr(qj) <= budget (1 + 1e-8).
CovariancePair validate_covariances(const WiretapChannel& ch,
                                    const CovariancePair& cov,
                                    double budget = -1.0);

/// log2 det(I + (I + G2 Qj G2^H)^-1 H1 Qa H1^H).
double rate_legitimate(const WiretapChannel& ch, const CovariancePair& cov);
/// log2 det(I + (I + H2 Qj H2^H)^-1 G1 Qa G1^H).
double rate_eavesdropper(const WiretapChannel& ch, const CovariancePair& cov);
/// max(rate_legitimate - rate_eavesdropper, 0).
double secrecy_rate(const WiretapChannel& ch, const CovariancePair& cov);

/// Scores a covariance pair with the true rates.
SecrecyResult evaluate(const WiretapChannel& ch, const CovariancePair& cov);

/// Zero covariances of the right shapes.
CovariancePair zero_covariances(const AntennaConfig& config);

/// JSON document {"na","nb","ne","nj","h1_re","h1_im",...} with row-major
/// 2-D arrays for h1, g1, g2, h2.
WiretapChannel channel_from_json(const std::string& text);
std::string channel_to_json(const WiretapChannel& ch);
WiretapChannel load_channel(const std::string& path);
void save_channel(const WiretapChannel& ch, const std::string& path);

}  // namespace wiretap
