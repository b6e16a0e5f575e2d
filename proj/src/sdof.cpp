#include "wiretap/sdof.hpp"

#include <algorithm>
#include <sstream>

#include "wiretap/errors.hpp"

namespace wiretap {

namespace {

int pos(int x) { return std::max(x, 0); }

// Floor of x / 2 for possibly negative x.
int half_floor(int x) { return x >= 0 ? x / 2 : -((-x + 1) / 2); }

SdofBreakdown finish(int d0, int d1, int d2, int s, int row,
                     const AntennaConfig& c) {
  SdofBreakdown b{d0, d1, d2, s, 0, row};
  b.d_star = std::min({d0 + d1 + d2, c.na, c.nb});
  return b;
}

CMatrix columns(const CMatrix& m, int first, int count) {
  if (count <= 0) return CMatrix(m.rows(), 0);
  if (first < 0 || first + count > m.cols()) {
    throw DegenerateChannel("alignment: column slice out of range");
  }
  return m.middleCols(first, count);
}

void expect_cols(const CMatrix& m, int expected, const char* what) {
  if (m.cols() != expected) {
    std::ostringstream os;
    os << "alignment: " << what << " has " << m.cols() << " columns, expected "
       << expected << " for a generic channel";
    throw DegenerateChannel(os.str());
  }
}

}  // namespace

SdofBreakdown sdof_closed_form(const AntennaConfig& c) {
  c.validate();
  const int d0 = pos(c.na - c.ne);
  const int d1 = pos(std::min(c.na, c.ne) + pos(c.nj - c.nb) - c.ne);
  const int rest = c.na - (d0 + d1);
  // rest < 0 only when d0 + d1 already exceeds Nb, so clipping s at zero
  // leaves d* unchanged.
  const int s = pos(std::min(rest, c.ne) + std::min(c.nj, c.ne) -
                    std::min(rest + c.nj, c.ne));
  const int d2 = std::min(s, pos(half_floor(c.nb - (d0 + d1))));
  return finish(d0, d1, d2, s, 0, c);
}

SdofBreakdown sdof_table_lookup(const AntennaConfig& c) {
  c.validate();
  const int na = c.na, nb = c.nb, ne = c.ne, nj = c.nj;
  const bool helper_mid = nb < nj && nj < ne + nb;

  if (na >= ne + nb) return finish(std::min(na, nb), 0, 0, 0, 1, c);
  if (nj >= ne + nb) return finish(std::min(na, nb), 0, 0, 0, 2, c);
  if (helper_mid && 2 * nb + ne - nj <= na && na < ne + nb) {
    return finish(std::min(na, nb), 0, 0, 0, 3, c);
  }
  if (helper_mid && nb + ne - nj < na && na < 2 * nb + ne - nj) {
    const int s = std::min(nb + ne - nj, ne) + std::min(nj, ne) - ne;
    const int linear = na + nj - (nb + ne);
    const int extra = std::min(s, half_floor(2 * nb + ne - na - nj));
    return finish(linear, 0, extra, s, 4, c);
  }
  if (ne < na && na < ne + nb && nj <= nb) {
    const int s = std::min(nj, ne);
    const int extra = std::min(s, half_floor(nb + ne - na));
    return finish(na - ne, 0, extra, s, 5, c);
  }
  const int s = std::min(na, ne) + std::min(nj, ne) - std::min(na + nj, ne);
  if (helper_mid && na <= nb + ne - nj) {
    return finish(0, 0, std::min(s, half_floor(nb)), s, 6, c);
  }
  if (na <= ne && nj <= nb) {
    return finish(0, 0, std::min(s, half_floor(nb)), s, 7, c);
  }
  throw std::logic_error("sdof_table_lookup: no row matches " + c.to_string());
}

bool positive_sdof_condition(const AntennaConfig& c) {
  c.validate();
  return c.nb == 1 ? c.ne < c.na + c.nj - 1 : c.ne < c.na + c.nj;
}

std::string to_string(AlignmentCase c) {
  switch (c) {
    case AlignmentCase::kSourceNulling: return "I";
    case AlignmentCase::kHelperNulling: return "II";
    case AlignmentCase::kHelperGsvd: return "III";
    case AlignmentCase::kSourceGsvd: return "IV";
  }
  return "?";
}

AlignmentCase alignment_case(const AntennaConfig& c) {
  if (c.na >= c.ne + c.nb) return AlignmentCase::kSourceNulling;
  if (c.nj >= c.nb + c.ne) return AlignmentCase::kHelperNulling;
  if (c.nj > c.nb) return AlignmentCase::kHelperGsvd;
  return AlignmentCase::kSourceGsvd;
}

PrecoderPair alignment_precoders(const WiretapChannel& ch) {
  ch.validate();
  const AntennaConfig& c = ch.config;
  const int na = c.na, nb = c.nb;
  PrecoderPair out;

  switch (alignment_case(c)) {
    case AlignmentCase::kSourceNulling: {
      out.v = null_space_basis(ch.g1);
      expect_cols(out.v, na - c.ne, "null(G1)");
      out.w = CMatrix(c.nj, 0);
      break;
    }
    case AlignmentCase::kHelperNulling: {
      out.w = null_space_basis(ch.g2);
      expect_cols(out.w, c.nj - nb, "null(G2)");
      Eigen::JacobiSVD<CMatrix> svd(ch.h1, Eigen::ComputeFullV);
      out.v = svd.matrixV().leftCols(std::min(na, nb));
      break;
    }
    case AlignmentCase::kHelperGsvd: {
      const CMatrix v0 = null_space_basis(ch.g1);
      const int d0 = pos(na - c.ne);
      expect_cols(v0, d0, "null(G1)");
      const CMatrix gamma = null_space_basis(ch.g2);
      expect_cols(gamma, c.nj - nb, "null(G2)");
      const CMatrix v0c = null_space_basis(v0.adjoint());
      const GsvdResult g3 = gsvd_transform(ch.h2 * gamma, ch.g1 * v0c);
      const int d1 = g3.s;
      const int c3 = g3.psi2_common_offset();
      if (d0 + d1 >= nb) {
        const int n = nb - d0;
        out.w = gamma * columns(g3.psi1, g3.r, n);
        out.v = hcat(v0, v0c * columns(g3.psi2, c3, n));
        break;
      }
      const CMatrix w1 = gamma * columns(g3.psi1, g3.r, d1);
      const CMatrix v01 = hcat(v0, v0c * columns(g3.psi2, c3, d1));
      const CMatrix v01c = null_space_basis(v01.adjoint());
      expect_cols(v01c, na - d0 - d1, "null([V0 V1]^H)");
      const GsvdResult g4 = gsvd_transform(ch.h2, ch.g1 * v01c);
      const int d2 = std::min(g4.s, half_floor(nb - (d0 + d1)));
      out.w = hcat(w1, columns(g4.psi1, g4.r, d2));
      out.v = hcat(v01, v01c * columns(g4.psi2, g4.psi2_common_offset(), d2));
      break;
    }
    case AlignmentCase::kSourceGsvd: {
      const CMatrix v0 = null_space_basis(ch.g1);
      const int d0 = pos(na - c.ne);
      expect_cols(v0, d0, "null(G1)");
      const CMatrix v0c = null_space_basis(v0.adjoint());
      const GsvdResult g4 = gsvd_transform(ch.h2, ch.g1 * v0c);
      const int d2 = std::min(g4.s, half_floor(nb - d0));
      out.w = columns(g4.psi1, g4.r, d2);
      out.v = hcat(v0, v0c * columns(g4.psi2, g4.psi2_common_offset(), d2));
      break;
    }
  }

  const int expected = sdof_closed_form(c).d_star;
  const int achieved = out.v.cols() > 0 ? numeric_rank(ch.h1 * out.v) : 0;
  if (achieved != expected) {
    std::ostringstream os;
    os << "alignment case " << to_string(alignment_case(c)) << " on "
       << c.to_string() << ": rank(H1 V) = " << achieved << ", expected "
       << expected;
    throw DegenerateChannel(os.str());
  }
  if (!verify_alignment(ch, out).ok()) {
    throw DegenerateChannel("alignment case " + to_string(alignment_case(c)) +
                            " on " + c.to_string() +
                            ": constraints fail at tolerance");
  }
  return out;
}

AlignmentReport verify_alignment(const WiretapChannel& ch,
                                 const PrecoderPair& pair, double tol) {
  ch.validate();
  if (pair.v.rows() != ch.config.na || pair.w.rows() != ch.config.nj) {
    throw InvalidInput("verify_alignment: precoder shapes do not match channel");
  }
  AlignmentReport rep;
  const CMatrix g1v = ch.g1 * pair.v;
  const CMatrix h2w = ch.h2 * pair.w;
  const CMatrix g2w = ch.g2 * pair.w;
  const CMatrix h1v = ch.h1 * pair.v;
  // Nulls below the tolerance are treated as exact zeros.
  auto scrub = [tol](const CMatrix& m, const CMatrix& factor) {
    const double scale = std::max(factor.norm(), 1e-300);
    return m.norm() <= tol * scale ? CMatrix(CMatrix::Zero(m.rows(), m.cols()))
                                   : m;
  };
  const CMatrix g1v_s = scrub(g1v, ch.g1);
  const CMatrix g2w_s = scrub(g2w, ch.g2);
  rep.eavesdropper_aligned = span_contained(g1v_s, h2w, tol);
  rep.receiver_separated = span_intersection_trivial(g2w_s, h1v, tol);
  if (ch.config.nb == 1) {
    rep.message_visible = h1v.cols() > 0 && h1v.norm() > tol * ch.h1.norm();
  }
  return rep;
}

MisoDirections misome_alignment_directions(const WiretapChannel& ch) {
  ch.validate();
  const AntennaConfig& c = ch.config;
  if (c.nb != 1) throw InvalidInput("misome directions need Nb = 1");
  if (c.nj < 2) throw InvalidInput("misome directions need Nj >= 2");
  if (c.ne >= c.na + c.nj - 1) {
    throw Infeasible("Ne >= Na + Nj - 1: no alignment direction exists for " +
                     c.to_string());
  }
  MisoDirections out;
  out.gamma = null_space_basis(ch.g2);
  expect_cols(out.gamma, c.nj - 1, "null(g2)");
  const GsvdResult gs = gsvd_transform(ch.h2 * out.gamma, ch.g1);
  if (gs.s < 1) {
    throw DegenerateChannel("misome directions: no shared subspace");
  }
  out.w_o = gs.psi1.col(gs.r).normalized();
  out.v_o = gs.psi2.col(gs.psi2_common_offset()).normalized();
  return out;
}

CovariancePair equal_power_covariances(const PrecoderPair& pair, double power) {
  const auto streams = pair.v.cols() + pair.w.cols();
  const auto na = pair.v.rows();
  const auto nj = pair.w.rows();
  if (streams == 0) return {CMatrix::Zero(na, na), CMatrix::Zero(nj, nj)};
  const double per_stream = power / static_cast<double>(streams);
  CovariancePair cov;
  cov.qa = pair.v.cols() > 0 ? CMatrix(per_stream * pair.v * pair.v.adjoint())
                             : CMatrix(CMatrix::Zero(na, na));
  cov.qj = pair.w.cols() > 0 ? CMatrix(per_stream * pair.w * pair.w.adjoint())
                             : CMatrix(CMatrix::Zero(nj, nj));
  return cov;
}

}  // namespace wiretap
