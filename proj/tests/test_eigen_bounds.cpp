#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "inthop/diagnostics.hpp"
#include "inthop/eigen_bounds.hpp"
#include "oracles.hpp"

using namespace inthop;

namespace {

IntervalMatrix bounds_2x2(double a_lo, double a_hi, double b_lo, double b_hi, double c_lo, double c_hi) {
  return IntervalMatrix::from_bounds(2, {{a_lo, a_hi}, {b_lo, b_hi}, {b_lo, b_hi}, {c_lo, c_hi}});
}

// Enclosure computed for the two-variable example over [0,2]^2.
IntervalMatrix natural_fixture() { return bounds_2x2(0, 118, -69, 860, 0, 2152); }
// Exact range of the same Hessian over the same box.
IntervalMatrix exact_fixture() { return bounds_2x2(0, 118, -5, 860, 0, 2152); }

IntervalMatrix point(const Eigen::MatrixXd& m) {
  IntervalMatrix a(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) a(i, j) = Interval(m(i, j));
  return a;
}

}  // namespace

TEST(SymEigen, DiagonalMatrix) {
  const Eigen::VectorXd ev = sym_eigen(Eigen::Vector2d(3, 2).asDiagonal().toDenseMatrix());
  EXPECT_DOUBLE_EQ(ev[0], 2.0);
  EXPECT_DOUBLE_EQ(ev[1], 3.0);
}

TEST(SymEigen, TwoByTwoClosedForm) {
  Eigen::Matrix2d m;
  m << 59, 860, 860, 1076;
  const double want = 567.5 - std::sqrt(508.5 * 508.5 + 860.0 * 860.0);
  EXPECT_NEAR(lambda_min(m), want, 1e-10 * std::abs(want));
  EXPECT_NEAR(want, -431.586, 1e-3);
}

TEST(SymEigen, AntiDiagonal) {
  Eigen::Matrix2d m;
  m << 0, 395.5, 395.5, 0;
  const Eigen::VectorXd ev = sym_eigen(m);
  EXPECT_NEAR(ev[0], -395.5, 1e-12);
  EXPECT_NEAR(ev[1], 395.5, 1e-12);
}

TEST(SymEigen, MatchesJacobiOracle) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  for (int n : {1, 2, 3, 5, 8, 20, 60}) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = z(rng);
    a = 0.5 * (a + a.transpose()).eval();
    const Eigen::VectorXd ev = sym_eigen(a);
    const auto want = oracle::jacobi_eigenvalues(a);
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    for (int i = 0; i < n; ++i) EXPECT_NEAR(ev[i], want[static_cast<std::size_t>(i)], 1e-10 * scale);
  }
}

TEST(SymEigen, ChargesLedger) {
  Counters c;
  sym_eigen(Eigen::Matrix2d::Identity(), c);
  EXPECT_EQ(c.n3_ops, 1);
  EXPECT_THROW(sym_eigen(Eigen::Matrix2d::Constant(std::nan(""))), NonFiniteMatrix);
}

TEST(Gerschgorin, WorkedFixtures) {
  EXPECT_EQ(lambda_min_ggn(natural_fixture()), -860.0);
  EXPECT_EQ(lambda_min_ggn(exact_fixture()), -860.0);
  EXPECT_EQ(lambda_min_ggn(bounds_2x2(1, 1, 0, 0, 3, 3)), 1.0);
}

TEST(MidpointRadius, WorkedFixtures) {
  EXPECT_NEAR(lambda_min_em(natural_fixture()), -1332.92, 0.01);
  EXPECT_NEAR(lambda_min_em(exact_fixture()), -1331.88, 0.01);
  EXPECT_EQ(lambda_min_em(point(Eigen::Vector2d(2, 3).asDiagonal().toDenseMatrix())), 2.0);
}

TEST(EndpointMatrix, WorkedFixtures) {
  EXPECT_NEAR(lambda_min_mk(natural_fixture()), -2581.44, 0.01);
  EXPECT_NEAR(lambda_min_mk(exact_fixture()), -2475.11, 0.01);
  EXPECT_EQ(lambda_min_mk(point(Eigen::Vector2d(2, 3).asDiagonal().toDenseMatrix())), 2.0);
}

TEST(Bounds, ClosedFormAgreesWithJacobiOracle) {
  // Independent recomputation of the midpoint-radius and endpoint bounds.
  const IntervalMatrix a = natural_fixture();
  Eigen::Matrix2d mid_e, rad_e, lo, hi;
  mid_e << 59, 395.5, 395.5, 1076;  // midpoint matrix
  rad_e << 59, 464.5, 464.5, 1076;   // radius matrix
  lo << 0, -69, -69, 0;
  hi << 118, 860, 860, 2152;
  const double em = oracle::jacobi_lambda_min(mid_e) - oracle::jacobi_eigenvalues(rad_e).back();
  const Eigen::Matrix2d d = hi - lo;
  const auto dev = oracle::jacobi_eigenvalues(d);
  const double mk = oracle::jacobi_lambda_min(lo) - std::max(std::abs(dev.front()), std::abs(dev.back()));
  EXPECT_NEAR(lambda_min_em(a), em, 1e-9);
  EXPECT_NEAR(lambda_min_mk(a), mk, 1e-9);
}

TEST(Bounds, PointMatrixExactness) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 5;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = z(rng);
    const double want = lambda_min(m);
    EXPECT_NEAR(lambda_min_em(point(m)), want, 1e-12 * (1 + std::abs(want)));
    EXPECT_NEAR(lambda_min_mk(point(m)), want, 1e-12 * (1 + std::abs(want)));
    double ggn = 1e300;
    for (int i = 0; i < n; ++i) ggn = std::min(ggn, m(i, i) - (m.row(i).cwiseAbs().sum() - std::abs(m(i, i))));
    EXPECT_NEAR(lambda_min_ggn(point(m)), ggn, 1e-12 * (1 + std::abs(ggn)));
  }
}

TEST(Bounds, ScaleEquivariance) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = diagnostics::random_symmetric_interval_matrix(1 + trial % 5, rng);
    const double s = 3.5;
    IntervalMatrix b(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a.size(); ++j) b(i, j) = Interval(s * a(i, j).lo(), s * a(i, j).hi());
    EXPECT_NEAR(lambda_min_ggn(b), s * lambda_min_ggn(a), 1e-10 * (1 + std::abs(s * lambda_min_ggn(a))));
    EXPECT_NEAR(lambda_min_em(b), s * lambda_min_em(a), 1e-10 * (1 + std::abs(s * lambda_min_em(a))));
    EXPECT_NEAR(lambda_min_mk(b), s * lambda_min_mk(a), 1e-10 * (1 + std::abs(s * lambda_min_mk(a))));
  }
}

TEST(Bounds, SoundnessAgainstSamplesAndVertices) {
  const auto rep = diagnostics::check_eigen_bounds();
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.ggn.violated + rep.em.violated + rep.mk.violated, 0);
  EXPECT_GT(rep.mk_vertex.checked, 0);
}

TEST(Bounds, LedgerCharges) {
  Counters c;
  lambda_min_bound(natural_fixture(), AlphaMethod::GGN, c);
  EXPECT_EQ(c.n3_ops, 0);
  lambda_min_bound(natural_fixture(), AlphaMethod::EM, c);
  EXPECT_EQ(c.n3_ops, 1);
  lambda_min_bound(natural_fixture(), AlphaMethod::MK, c);
  EXPECT_EQ(c.n3_ops, 2);
}

TEST(Bounds, FixtureRuntime) {
  const auto a = natural_fixture();
  for (auto m : {AlphaMethod::GGN, AlphaMethod::EM, AlphaMethod::MK}) {
    Counters c;
    const auto t0 = std::chrono::steady_clock::now();
    lambda_min_bound(a, m, c);
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1e-3);
  }
}

TEST(Alpha, ShiftRule) {
  EXPECT_EQ(alpha_from_lambda(-860.0), 430.0);
  EXPECT_EQ(alpha_from_lambda(5.0), 0.0);
  EXPECT_EQ(alpha_from_lambda(0.0), 0.0);
}

TEST(Alpha, MethodNamesRoundTrip) {
  for (auto m : {AlphaMethod::GGN, AlphaMethod::EM, AlphaMethod::MK}) EXPECT_EQ(parse_alpha_method(to_string(m)), m);
  EXPECT_THROW(parse_alpha_method("xx"), std::invalid_argument);
}
