#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "gaussep/matlin.hpp"
#include "oracles.hpp"

using namespace gaussep;

namespace {

CMat i_j1() {
  CMat m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

RMat random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  RMat m(rows, cols);
  for (Eigen::Index j = 0; j < rows; ++j)
    for (Eigen::Index k = 0; k < cols; ++k) m(j, k) = nd(rng);
  return m;
}

}  // namespace

TEST(ToleranceConfig, DefaultsAndBounds) {
  ToleranceConfig tol;
  EXPECT_EQ(tol.psd_tol, 1e-9);
  EXPECT_EQ(tol.pinv_rcond, 1e-12);
  EXPECT_EQ(tol.decision_margin, 1e-10);
  EXPECT_NO_THROW(tol.validate());
  tol.psd_tol = 0.0;
  EXPECT_THROW(tol.validate(), InputError);
  tol.psd_tol = 1e-2;
  EXPECT_THROW(tol.validate(), InputError);
}

TEST(HermitianMatrix, SymmetrizesOnIngest) {
  CMat m(2, 2);
  m << Complex(1, 0.5), Complex(2, 1), Complex(0, 0), Complex(3, 0);
  const HermitianMatrix h(m);
  EXPECT_EQ((h.matrix() - h.matrix().adjoint()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(h.matrix()(0, 0).imag(), 0.0);
}

TEST(PsdCheck, Examples) {
  const ToleranceConfig tol;
  const PsdResult id = psd_check(HermitianMatrix(CMat(CMat::Identity(2, 2))), tol);
  EXPECT_TRUE(id.is_psd);
  EXPECT_NEAR(id.lambda_min, 1.0, 1e-15);

  const PsdResult vac = psd_check(HermitianMatrix(CMat(CMat::Identity(2, 2) - i_j1())), tol);
  EXPECT_TRUE(vac.is_psd);
  EXPECT_NEAR(vac.lambda_min, 0.0, 1e-15);

  const PsdResult half =
      psd_check(HermitianMatrix(CMat(0.5 * CMat::Identity(2, 2) - i_j1())), tol);
  EXPECT_FALSE(half.is_psd);
  EXPECT_NEAR(half.lambda_min, -0.5, 1e-15);
}

TEST(PsdCheck, ToleranceIsRelativeToNorm) {
  const ToleranceConfig tol;
  RMat m = RMat::Zero(2, 2);
  m(0, 0) = 1e6;
  m(1, 1) = -1e-4;  // -1e-10 relative
  EXPECT_TRUE(psd_check(m, tol).is_psd);
  m(1, 1) = -1e-2;
  EXPECT_FALSE(psd_check(m, tol).is_psd);
}

TEST(PsdCheck, RejectsNonFinite) {
  RMat m = RMat::Identity(2, 2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(psd_check(m, ToleranceConfig{}), InputError);
  m(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(HermitianMatrix{m}, InputError);
}

TEST(Pseudoinverse, RankDeficientDiagonal) {
  RMat d = RMat::Zero(2, 2);
  d(0, 0) = 2.0;
  const CMat p = pseudoinverse(HermitianMatrix(d), ToleranceConfig{}).matrix();
  EXPECT_NEAR(p(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(p(1, 1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(p(0, 1)), 0.0, 1e-15);
}

TEST(Pseudoinverse, VacuumBlockMatchesClosedFormEigendecomposition) {
  // I - iJ_1 = [[1, i], [-i, 1]]: eigenvalues 0 and 2.
  const CMat m = CMat::Identity(2, 2) - i_j1();
  const oracle::Eig2 e = oracle::eig2(1.0, m(0, 1), 1.0);
  ASSERT_NEAR(e.lo, 0.0, 1e-15);
  ASSERT_NEAR(e.hi, 2.0, 1e-15);
  const CMat projector = e.v_hi * e.v_hi.adjoint();
  const CMat expected = 0.5 * projector;

  const CMat p = pseudoinverse(HermitianMatrix(m), ToleranceConfig{}).matrix();
  EXPECT_LT((p - expected).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((m * p - projector).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Pseudoinverse, Identity) {
  const CMat p = pseudoinverse(HermitianMatrix(CMat(CMat::Identity(3, 3))), ToleranceConfig{}).matrix();
  EXPECT_LT((p - CMat::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Pseudoinverse, PenroseConditionsOnRandomPsd) {
  std::mt19937_64 rng(11);
  const ToleranceConfig tol;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index dim = 2 + trial % 6;
    const Eigen::Index rank = 1 + trial % dim;
    CMat g(dim, rank);
    g.real() = random_matrix(dim, rank, rng);
    g.imag() = random_matrix(dim, rank, rng);
    const CMat m = g * g.adjoint();
    const HermitianMatrix hm(m);
    const CMat p = pseudoinverse(hm, tol).matrix();
    const double scale = m.cwiseAbs().maxCoeff();
    EXPECT_LT((p - p.adjoint()).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, p.cwiseAbs().maxCoeff()));
    EXPECT_TRUE(psd_check(HermitianMatrix(p), tol).is_psd);
    EXPECT_LT((m * p * m - m).cwiseAbs().maxCoeff(), 1e-8 * scale);
    EXPECT_LT((p * m * p - p).cwiseAbs().maxCoeff(), 1e-8 * std::max(1.0, p.cwiseAbs().maxCoeff()));
  }
}

TEST(Norms, OperatorNormExamples) {
  EXPECT_EQ(operator_norm(RMat(RMat::Zero(3, 3))), 0.0);
  RMat d = RMat::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 1.0;
  EXPECT_NEAR(operator_norm(d), 2.0, 1e-15);
}

TEST(Norms, OperatorNormMatchesRandomizedOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const RMat m = random_matrix(4, 4, rng);
    const double sigma = operator_norm(m);
    // Sampled unit vectors never exceed sigma_max ...
    std::normal_distribution<double> nd;
    double sampled = 0.0;
    for (int s = 0; s < 10000; ++s) {
      Eigen::Vector4d v(nd(rng), nd(rng), nd(rng), nd(rng));
      sampled = std::max(sampled, (m * v.normalized()).norm());
    }
    EXPECT_LE(sampled, sigma * (1 + 1e-12));
    EXPECT_GT(sampled, 0.9 * sigma);
    // ... and power iteration from random starts pins it down.
    EXPECT_NEAR(oracle::power_opnorm(m, 20, rng), sigma, 1e-8);
  }
}

TEST(Norms, TraceNormExamples) {
  EXPECT_NEAR(trace_norm(RMat(RMat::Identity(6, 6))), 6.0, 1e-14);
  RMat d = RMat::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = -1.0;
  EXPECT_NEAR(trace_norm(d), 4.0, 1e-14);

  std::mt19937_64 rng(5);
  const RMat g = random_matrix(5, 5, rng);
  const RMat psd = g * g.transpose();
  EXPECT_NEAR(trace_norm(psd), psd.trace(), 1e-10);
}

TEST(Norms, OperatorNormBoundedByTraceNorm) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const RMat m = random_matrix(1 + trial % 5, 1 + (trial / 5) % 5, rng);
    EXPECT_LE(operator_norm(m), trace_norm(m) * (1 + 1e-14));
    CMat c(m.rows(), m.cols());
    c.real() = m;
    c.imag() = random_matrix(m.rows(), m.cols(), rng);
    EXPECT_LE(operator_norm(c), trace_norm(c) * (1 + 1e-14));
  }
}

TEST(SchurPsd, Examples) {
  const ToleranceConfig tol;
  const RMat i2 = RMat::Identity(2, 2);
  SchurResult r = schur_psd(i2, i2, RMat::Zero(2, 2), tol);
  EXPECT_TRUE(r.is_psd);
  EXPECT_TRUE(r.kernel_ok);

  const RMat one = RMat::Identity(1, 1);
  r = schur_psd(one, one, RMat::Constant(1, 1, 2.0), tol);
  EXPECT_FALSE(r.is_psd);
  EXPECT_TRUE(r.kernel_ok);
  EXPECT_NEAR(r.schur_lambda_min, -3.0, 1e-14);
}

TEST(SchurPsd, KernelConditionDetected) {
  const ToleranceConfig tol;
  // B = diag(1, 0) and C has weight on ker(B): M cannot be PSD.
  RMat b = RMat::Zero(2, 2);
  b(0, 0) = 1.0;
  RMat c = RMat::Zero(2, 2);
  c(0, 1) = 0.5;
  const SchurResult r = schur_psd(RMat::Identity(2, 2), b, c, tol);
  EXPECT_FALSE(r.kernel_ok);
  EXPECT_FALSE(r.is_psd);
  EXPECT_NEAR(r.kernel_residual, 0.5, 1e-15);
}

TEST(SchurPsd, ShapeMismatch) {
  EXPECT_THROW(schur_psd(RMat::Identity(2, 2), RMat::Identity(3, 3), RMat::Zero(3, 2),
                         ToleranceConfig{}),
               InputError);
}

TEST(SchurPsd, AgreesWithDirectEigenvalueTest) {
  std::mt19937_64 rng(2024);
  const ToleranceConfig tol;
  int disagreements = 0;
  int compared = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index na = 1 + trial % 4;
    const Eigen::Index nb = 1 + (trial / 4) % 4;
    const Eigen::Index rank_b = (trial % 3 == 0) ? std::max<Eigen::Index>(1, nb - 1) : nb;
    const RMat ga = random_matrix(na, na + 1, rng);
    const RMat gb = random_matrix(nb, rank_b, rng);
    const RMat a = ga * ga.transpose();
    const RMat b = gb * gb.transpose();
    RMat c = random_matrix(na, nb, rng) * (0.3 + 0.2 * (trial % 5));
    if (trial % 3 == 0) c = c * b / std::max(1.0, b.norm());  // keep ker(B) in ker(C) sometimes
    RMat m(na + nb, na + nb);
    m << a, c, c.transpose(), b;
    const double direct = oracle::lambda_min(m);
    if (std::abs(direct) <= 1e-8) continue;
    ++compared;
    if (schur_psd(a, b, c, tol).is_psd != (direct > 0)) ++disagreements;
  }
  EXPECT_GT(compared, 350);
  EXPECT_EQ(disagreements, 0);
}

TEST(HermitianReducePsd, Examples) {
  const ToleranceConfig tol;
  EXPECT_TRUE(hermitian_reduce_psd(RMat::Identity(2, 2), RMat::Zero(2, 2), tol).is_psd);
  const RMat j1 = oracle::symplectic(1);
  const PsdResult r = hermitian_reduce_psd(RMat::Identity(2, 2), 2.0 * j1, tol);
  EXPECT_FALSE(r.is_psd);
  EXPECT_NEAR(r.lambda_min, -1.0, 1e-14);
}

TEST(HermitianReducePsd, RejectsWrongSymmetry) {
  const ToleranceConfig tol;
  RMat a = RMat::Identity(2, 2);
  a(0, 1) = 0.3;
  EXPECT_THROW(hermitian_reduce_psd(a, RMat::Zero(2, 2), tol), InputError);
  RMat c = RMat::Zero(2, 2);
  c(0, 1) = 0.3;
  c(1, 0) = 0.3;
  EXPECT_THROW(hermitian_reduce_psd(RMat::Identity(2, 2), c, tol), InputError);
}

TEST(HermitianReducePsd, AgreesWithRealBlockTest) {
  std::mt19937_64 rng(99);
  const ToleranceConfig tol;
  int disagreements = 0;
  int compared = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index n = 1 + trial % 5;
    const RMat g = random_matrix(n, n, rng);
    const RMat a = g * g.transpose() + 0.1 * RMat::Identity(n, n);
    const RMat k = random_matrix(n, n, rng) * (0.2 + 0.3 * (trial % 4));
    const RMat c = k - k.transpose();
    RMat m(2 * n, 2 * n);
    m << a, c, c.transpose(), a;
    const double direct = oracle::lambda_min(m);
    if (std::abs(direct) <= 1e-8) continue;
    ++compared;
    if (hermitian_reduce_psd(a, c, tol).is_psd != (direct > 0)) ++disagreements;
  }
  EXPECT_GT(compared, 450);
  EXPECT_EQ(disagreements, 0);
}
