#pragma once

#include <string>

#include "wiretap/channel.hpp"

namespace wiretap {

/// Components of the closed-form secure degrees of freedom. `s` is the shared
/// dimension that caps the jamming-assisted streams d2.
struct SdofBreakdown {
  int d0 = 0;
  int d1 = 0;
  int d2 = 0;
  int s = 0;
  int d_star = 0;
  /// 1-based row of the summary table that produced the value (0 when the
  /// breakdown comes from the compact formula).
  int table_row = 0;
};

/// Evaluates d0 -> d1 -> s -> d2 -> d* in that order (s depends on d0, d1).
SdofBreakdown sdof_closed_form(const AntennaConfig& config);

/// Independent row-by-row evaluation of the summary table. The table's rows
/// overlap on some equalities; the first matching row wins. For rows with a
/// two-part formula, d0 carries the linear part and d2 the min{s, .} part.
SdofBreakdown sdof_table_lookup(const AntennaConfig& config);

/// Nb = 1: Ne < Na + Nj - 1. Nb > 1: Ne < Na + Nj.
bool positive_sdof_condition(const AntennaConfig& config);

enum class AlignmentCase { kSourceNulling, kHelperNulling, kHelperGsvd, kSourceGsvd };

std::string to_string(AlignmentCase c);

/// Case I: Na >= Ne + Nb.  Case II: Nj >= Nb + Ne.
/// Case III: Nb < Nj < Ne + Nb.  Case IV: Nj <= Nb.
AlignmentCase alignment_case(const AntennaConfig& config);

/// Source precoder v (Na x Ka) and helper precoder w (Nj x Kj), unit-norm
/// columns; either may have zero columns.
struct PrecoderPair {
  CMatrix v;
  CMatrix w;
};

/// Closed-form precoders that keep message and jamming separable at the
/// legitimate receiver while hiding the message inside the jamming subspace at
/// the eavesdropper. rank(h1 * v) equals sdof_closed_form(config).d_star.
/// Throws DegenerateChannel if the realization is not generic enough for the
/// construction to hit that rank or to pass verify_alignment.
PrecoderPair alignment_precoders(const WiretapChannel& ch);

struct AlignmentReport {
  /// span(G1 V) inside span(H2 W).
  bool eavesdropper_aligned = false;
  /// span(G2 W) and span(H1 V) meet only in {0}.
  bool receiver_separated = false;
  /// For Nb = 1 only: |h1 v| > 0 for some column of v.
  bool message_visible = true;
  bool ok() const {
    return eavesdropper_aligned && receiver_separated && message_visible;
  }
};

AlignmentReport verify_alignment(const WiretapChannel& ch,
                                 const PrecoderPair& pair, double tol = 1e-8);

/// Single-antenna receiver alignment directions: gamma = null(g2),
/// w_o in C^{Nj-1}, v_o in C^{Na} with span(G1 v_o) = span(H2 gamma w_o).
struct MisoDirections {
  CVector v_o;
  CVector w_o;
  CMatrix gamma;

  /// Helper beam in antenna coordinates, gamma * w_o.
  CVector helper_beam() const { return gamma * w_o; }
};

/// Requires Nb = 1 and Nj >= 2 (InvalidInput otherwise); throws Infeasible
/// when Ne >= Na + Nj - 1.
MisoDirections misome_alignment_directions(const WiretapChannel& ch);

/// Total power split evenly over every column of v and w.
CovariancePair equal_power_covariances(const PrecoderPair& pair, double power);

}  // namespace wiretap
