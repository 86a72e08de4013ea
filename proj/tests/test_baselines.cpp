#include <gtest/gtest.h>

#include "inthop/baselines.hpp"
#include "inthop/bench.hpp"

using namespace inthop;

namespace {

std::shared_ptr<const CompiledProblem> make(const std::string& text, int n, std::vector<double> x0) {
  return compile(Problem{"p", n, parse_expr(text, n), std::move(x0), {}});
}

void expect_descent(const SolverResult& r) {
  for (const auto& it : r.trace) {
    EXPECT_LT(it.slope, 0.0);
    EXPECT_LT(it.f_next, it.f);
  }
}

}  // namespace

TEST(SteepestDescent, ScalarQuadratic) {
  const auto r = steepest_descent(*make("x1^2", 1, {1}), SolverConfig{});
  EXPECT_EQ(r.status, Status::Solved);
  EXPECT_LE(r.counters.iterations, 30);
  expect_descent(r);
}

TEST(SteepestDescent, TenDimensionalSphere) {
  const auto r = steepest_descent(*compile(load_problem(std::string(INTHOP_CORPUS_DIR) + "/sphere_10.prob")),
                                  SolverConfig{});
  EXPECT_EQ(r.status, Status::Solved);
  EXPECT_LT(r.f_final, 1e-6);
}

TEST(SteepestDescent, RosenbrockRecordsOutcome) {
  const auto r = steepest_descent(*compile(load_problem(std::string(INTHOP_CORPUS_DIR) + "/rosenbrock_2.prob")),
                                  SolverConfig{});
  EXPECT_TRUE(r.status == Status::Solved || r.status == Status::MaxIterations);
  expect_descent(r);
}

TEST(Bfgs, SolvesStrictlyConvexQuadratic) {
  SolverConfig cfg;
  cfg.eps_g = 1e-8;
  const auto r = bfgs(*make("x1^2 + 3*x2^2 + x1*x2 - x1", 2, {2, 1}), cfg);
  EXPECT_EQ(r.status, Status::Solved);
  // Minimiser (6/11, -1/11), value -3/11.
  EXPECT_NEAR(r.f_final, -3.0 / 11.0, 1e-10);
  expect_descent(r);
}

TEST(Bfgs, ExactLineSearchTerminatesOnQuadratic) {
  // With exact minimisation along each direction the update reproduces the
  // inverse Hessian after n steps and the iteration ends at the minimiser.
  Eigen::Matrix3d a;
  a << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const Eigen::Vector3d b(1, -2, 3);
  Eigen::Vector3d x(5, -1, 2);
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(3, 3);
  Eigen::Vector3d g = a * x - b;
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3d p = -(h * g);
    const double theta = -g.dot(p) / p.dot(a * p);
    const Eigen::Vector3d s = theta * p;
    x += s;
    const Eigen::Vector3d g_next = a * x - b;
    ASSERT_TRUE(bfgs_inverse_update(h, s, g_next - g));
    g = g_next;
  }
  EXPECT_LT(g.norm(), 1e-12);
  EXPECT_TRUE(h.isApprox(a.inverse(), 1e-10));
}

TEST(Bfgs, ScalarInverseHessianEstimate) {
  SolverConfig cfg;
  cfg.eps_g = 1e-10;
  Eigen::MatrixXd h;
  const auto r = bfgs(*make("x1^2", 1, {1}), cfg, &h);
  EXPECT_EQ(r.status, Status::Solved);
  ASSERT_EQ(h.rows(), 1);
  EXPECT_NEAR(h(0, 0), 0.5, 1e-12);
}

TEST(Bfgs, UpdateSkippedWithoutCurvature) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd before = h;
  EXPECT_FALSE(bfgs_inverse_update(h, Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)));
  EXPECT_EQ(h, before);
  EXPECT_TRUE(bfgs_inverse_update(h, Eigen::Vector2d(1, 0), Eigen::Vector2d(2, 0)));
  // Secant condition h y = s.
  EXPECT_TRUE((h * Eigen::Vector2d(2, 0)).isApprox(Eigen::Vector2d(1, 0)));
}

TEST(Bfgs, Rosenbrock) {
  const auto r = bfgs(*compile(load_problem(std::string(INTHOP_CORPUS_DIR) + "/rosenbrock_2.prob")), SolverConfig{});
  EXPECT_EQ(r.status, Status::Solved);
  expect_descent(r);
}

TEST(Cami, IndefiniteMatrixNeedsThreeAttempts) {
  Eigen::Matrix2d h;
  h << -1, 0, 0, 2;
  Counters c;
  const auto st = cami_factorize(h, 1000, c);
  EXPECT_TRUE(st.success);
  EXPECT_EQ(st.attempts, 3);
  EXPECT_EQ(st.tau, 2.0);
  EXPECT_EQ(c.n3_ops, 3);
}

TEST(Cami, AttemptCap) {
  Counters c;
  const auto st = cami_factorize(-10.0 * Eigen::Matrix2d::Identity(), 4, c);
  EXPECT_FALSE(st.success);
  EXPECT_EQ(st.attempts, 4);
}

TEST(Cami, ConvexQuadraticTakesOneNewtonStep) {
  const auto r = newton_cami(*make("x1^2 + 3*x2^2 + x1*x2 - x1", 2, {2, 1}), SolverConfig{});
  EXPECT_EQ(r.status, Status::Solved);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace[0].attempts, 1);
  EXPECT_EQ(r.trace[0].theta, 1.0);
  EXPECT_EQ(r.counters.h_evals, r.counters.iterations);
}

TEST(Cami, RosenbrockConverges) {
  const auto r =
      newton_cami(*compile(load_problem(std::string(INTHOP_CORPUS_DIR) + "/rosenbrock_2.prob")), SolverConfig{});
  ASSERT_EQ(r.status, Status::Solved);
  EXPECT_LT((r.x_final - Eigen::Vector2d(1, 1)).norm(), 1e-3);
  expect_descent(r);
  long charges = 1;  // terminal saddle check
  for (const auto& it : r.trace) charges += it.attempts + 1;
  EXPECT_EQ(r.counters.n3_ops, charges);
  EXPECT_EQ(r.counters.h_evals, r.counters.iterations);
}

TEST(Saddle, GradientPathToSaddleIsNotSolved) {
  const auto p = make("x1^2 - x2^2", 2, {1, 0});
  for (auto fn : {steepest_descent, newton_cami}) {
    const auto r = fn(*p, SolverConfig{});
    EXPECT_EQ(r.status, Status::SaddlePoint);
    EXPECT_FALSE(solved_check(r, *p, 1e-3, 1e-3));
  }
}
