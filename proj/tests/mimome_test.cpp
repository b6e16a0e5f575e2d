#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "test_util.hpp"
#include "wiretap/errors.hpp"
#include "wiretap/mimome.hpp"
#include "wiretap/sdof.hpp"

using namespace wiretap;
using wiretap::testing::random_matrix;
using wiretap::testing::random_psd;

namespace {

CMatrix scalar(double v) { return CMatrix::Constant(1, 1, cplx(v, 0.0)); }

CMatrix eye(int n) { return CMatrix::Identity(n, n); }

std::vector<double> gram_eigs(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.adjoint() * h);
  std::vector<double> g;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    g.push_back(std::max(es.eigenvalues()(i), 0.0));
  return g;
}

}  // namespace

TEST(Theta, ZeroCovarianceIdentityState) {
  WiretapChannel ch = sample_channel({2, 3, 2, 2}, 1);
  VariationalState s{eye(3), eye(2)};
  EXPECT_NEAR(theta_objective(ch, s, zero_covariances(ch.config)), 0.0, 1e-14);
}

TEST(Theta, BridgeIdentityAfterSUpdate) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 30; ++t) {
    WiretapChannel ch = sample_channel({3, 2, 3, 2}, 50 + t);
    CovariancePair cov{random_psd(rng, 3, 4.0), random_psd(rng, 2, 3.0)};
    VariationalState s = s_update(ch, cov);
    double raw = rate_legitimate(ch, cov) - rate_eavesdropper(ch, cov);
    EXPECT_NEAR(theta_objective(ch, s, cov), std::log(2.0) * raw, 1e-8);
  }
}

TEST(Theta, ScalarUnitGains) {
  WiretapChannel ch = make_channel(scalar(1), scalar(1), scalar(1), scalar(1));
  CovariancePair cov{scalar(1), scalar(1)};
  EXPECT_NEAR(theta_objective(ch, s_update(ch, cov), cov), 0.0, 1e-14);
}

TEST(Theta, SingularStateIsMinusInfinity) {
  WiretapChannel ch = sample_channel({2, 2, 2, 2}, 3);
  VariationalState s{CMatrix::Zero(2, 2), eye(2)};
  EXPECT_EQ(theta_objective(ch, s, zero_covariances(ch.config)),
            -std::numeric_limits<double>::infinity());
}

TEST(SUpdate, ClosedFormExamples) {
  WiretapChannel ch = sample_channel({2, 2, 3, 2}, 4);
  VariationalState s = s_update(ch, zero_covariances(ch.config));
  EXPECT_LE((s.s0 - eye(2)).norm(), 1e-14);
  EXPECT_LE((s.s1 - eye(3)).norm(), 1e-14);
  WiretapChannel sc = make_channel(scalar(1), scalar(1), scalar(1), scalar(1));
  EXPECT_NEAR(s_update(sc, {scalar(0), scalar(3)}).s0(0, 0).real(), 0.25, 1e-15);
}

TEST(SUpdate, MaximizesThetaOverStates) {
  std::mt19937_64 rng(5);
  WiretapChannel ch = sample_channel({2, 2, 2, 2}, 6);
  CovariancePair cov{random_psd(rng, 2, 2.0), random_psd(rng, 2, 1.0)};
  VariationalState best = s_update(ch, cov);
  const double top = theta_objective(ch, best, cov);
  for (int t = 0; t < 100; ++t) {
    VariationalState s{random_psd(rng, 2, 0.1 + 3.0 * t / 100.0) + 1e-3 * eye(2),
                       random_psd(rng, 2, 0.1 + 2.0 * t / 100.0) + 1e-3 * eye(2)};
    EXPECT_LE(theta_objective(ch, s, cov), top + 1e-12);
  }
}

TEST(QUpdate, HeavyPenaltyShutsSource) {
  WiretapChannel ch = sample_channel({2, 2, 4, 2}, 7);
  const double power = 10.0;
  Eigen::HouseholderQR<CMatrix> qr(ch.g1);
  CMatrix basis = qr.householderQ() * CMatrix::Identity(4, 2);
  VariationalState s{eye(2), eye(4) + 1e4 * basis * basis.adjoint()};
  QUpdateResult q = q_update(ch, s, power, isotropic_init(ch.config, power));
  EXPECT_LT(q.cov.qa.trace().real(), 0.01 * power);
}

TEST(QUpdate, ScalarMatchesFineGrid) {
  WiretapChannel ch = make_channel(scalar(1), scalar(1), scalar(1), scalar(1));
  VariationalState s{eye(1), eye(1)};
  const double power = 1.0;
  QUpdateResult q = q_update(ch, s, power, zero_covariances(ch.config));
  double best = -1e300;
  const int n = 1000;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) {
      double qa = power * i / n, qj = power * j / n;
      double th = std::log(1 + qa + qj) + std::log(1 + qj) - 2 * qj - qa;
      best = std::max(best, th);
    }
  EXPECT_NEAR(q.theta, best, 1e-3);
  EXPECT_GE(q.theta, best - 1e-9);
}

TEST(QUpdate, DecoupledChannelsMatchWaterFilling) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 5; ++t) {
    WiretapChannel ch = make_channel(random_matrix(rng, 2, 3), CMatrix::Zero(3, 3),
                                     CMatrix::Zero(2, 2), random_matrix(rng, 3, 2));
    const double power = 6.0, pen = 0.3;
    VariationalState s{eye(2), pen * eye(3)};
    QUpdateResult q = q_update(ch, s, power, isotropic_init(ch.config, power),
                               {1e-13, 5000, 1.0, 0.5, 1e-4});
    // Joint water level mu: source modes p = 1/mu - 1/a, helper modes
    // q = 1/(mu + pen g) - 1/g (the helper pays pen * g per unit power).
    auto a = gram_eigs(ch.h1), g = gram_eigs(ch.h2);
    auto spend = [&](double mu, double* value) {
      double used = 0, v = 0;
      for (double ai : a)
        if (ai > 1e-12) {
          double p = std::max(0.0, 1 / mu - 1 / ai);
          used += p;
          v += std::log(1 + ai * p);
        }
      for (double gi : g)
        if (gi > 1e-12) {
          double qq = std::max(0.0, 1 / (mu + pen * gi) - 1 / gi);
          used += qq;
          v += std::log(1 + gi * qq) - pen * gi * qq;
        }
      if (value) *value = v;
      return used;
    };
    double lo = 1e-9, hi = 1e6;
    for (int it = 0; it < 300; ++it) {
      double mid = std::sqrt(lo * hi);
      (spend(mid, nullptr) > power ? lo : hi) = mid;
    }
    double oracle;
    spend(hi, &oracle);
    // The Q-independent part of theta is its value at Q = 0.
    double constant = theta_objective(ch, s, zero_covariances(ch.config));
    EXPECT_NEAR(q.theta - constant, oracle, 1e-6);
  }
}

TEST(QUpdate, NeverLowersTheta) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 10; ++t) {
    WiretapChannel ch = sample_channel({3, 3, 3, 4}, 70 + t);
    CovariancePair cov{random_psd(rng, 3, 3.0), random_psd(rng, 4, 5.0)};
    VariationalState s = s_update(ch, cov);
    QUpdateResult q = q_update(ch, s, 10.0, cov);
    EXPECT_GE(q.theta, theta_objective(ch, s, cov) - 1e-9);
    EXPECT_LE(q.cov.total_power(), 10.0 * (1 + 1e-8));
  }
}

TEST(GaussSeidel, ZeroIterationsReturnsInitialRate) {
  WiretapChannel ch = sample_channel({3, 3, 3, 4}, 11);
  const double power = 100.0;
  GaussSeidelOptions o;
  o.tol = std::numeric_limits<double>::infinity();
  GaussSeidelReport r = gauss_seidel_solve(ch, power, o);
  CovariancePair init = alignment_init(ch, power);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_NEAR(r.result.cs, secrecy_rate(ch, init), 1e-12);
  o = {};
  o.max_iters = 0;
  EXPECT_NEAR(gauss_seidel_solve(ch, power, o).result.cs, secrecy_rate(ch, init), 1e-12);
}

TEST(GaussSeidel, ImprovesOnAlignmentStart) {
  for (int seed = 0; seed < 5; ++seed) {
    WiretapChannel ch = sample_channel({3, 3, 3, 4}, 200 + seed);
    const double power = 100.0;
    GaussSeidelReport r = gauss_seidel_solve(ch, power);
    double aligned = secrecy_rate(ch, equal_power_covariances(alignment_precoders(ch), power));
    EXPECT_GE(r.result.cs, aligned - 1e-6);
    EXPECT_NEAR(r.initial.cs, aligned, 1e-12);
  }
}

TEST(GaussSeidel, TraceAndBridgeProperties) {
  std::vector<int> iters;
  for (int seed = 0; seed < 50; ++seed) {
    WiretapChannel ch = sample_channel({3, 3, 3, 4}, 300 + seed);
    GaussSeidelReport r = gauss_seidel_solve(ch, 10.0);
    for (size_t i = 1; i < r.theta_trace.size(); ++i)
      EXPECT_GE(r.theta_trace[i], r.theta_trace[i - 1] - 1e-9);
    for (double gap : r.bridge_gaps) EXPECT_LE(gap, 1e-8);
    EXPECT_NEAR(r.result.cs, std::max(r.result.rd - r.result.re, 0.0), 1e-9);
    iters.push_back(r.iterations);
  }
  std::nth_element(iters.begin(), iters.begin() + 25, iters.end());
  EXPECT_LE(iters[25], 10);
}

TEST(GaussSeidel, RotationInvariance) {
  std::mt19937_64 rng(13);
  WiretapChannel ch = sample_channel({3, 3, 3, 4}, 17);
  Eigen::HouseholderQR<CMatrix> qr(random_matrix(rng, 3, 3));
  CMatrix u = qr.householderQ() * CMatrix::Identity(3, 3);
  WiretapChannel rot = make_channel(ch.h1 * u, ch.g1 * u, ch.g2, ch.h2);
  double a = gauss_seidel_solve(ch, 10.0).result.cs;
  double b = gauss_seidel_solve(rot, 10.0).result.cs;
  EXPECT_NEAR(a, b, 1e-4);
}

TEST(GaussSeidel, IsotropicFallbackWhenNoSdof) {
  WiretapChannel ch = sample_channel({1, 2, 4, 3}, 19);
  ASSERT_EQ(sdof_closed_form(ch.config).d_star, 0);
  bool aligned = true;
  CovariancePair init = alignment_init(ch, 10.0, &aligned);
  EXPECT_FALSE(aligned);
  EXPECT_NEAR(init.qa.trace().real(), 5.0, 1e-12);
  EXPECT_NEAR(init.qj.trace().real(), 5.0, 1e-12);
  GaussSeidelReport r = gauss_seidel_solve(ch, 10.0);
  auto& f = r.result.diagnostics.flags;
  EXPECT_NE(std::find(f.begin(), f.end(), "isotropic-fallback"), f.end());
  EXPECT_GE(r.result.cs, 0.0);
}

TEST(GaussSeidel, RejectsBadStart) {
  WiretapChannel ch = sample_channel({2, 2, 2, 2}, 1);
  CovariancePair big{10.0 * eye(2), eye(2)};
  EXPECT_THROW(gauss_seidel_solve_from(ch, 1.0, big), InvalidInput);
}
