#include <gtest/gtest.h>

#include "inthop/line_search.hpp"

using namespace inthop;

namespace {

Eigen::VectorXd v1(double a) { return Eigen::VectorXd::Constant(1, a); }

struct Square {
  int calls = 0;
  double operator()(const Eigen::VectorXd& x) {
    ++calls;
    return x.squaredNorm();
  }
};

}  // namespace

TEST(Armijo, BacktracksOnceOnOvershoot) {
  Square f;
  const Step s = armijo_backtrack(f, v1(1), v1(-2), v1(2), 1.0, LineSearchConfig{});
  EXPECT_EQ(s.theta, 0.5);
  EXPECT_EQ(s.f, 0.0);
  EXPECT_EQ(s.trials, 2);
  EXPECT_EQ(f.calls, 2);
}

TEST(Armijo, AcceptsFullStep) {
  Square f;
  const Step s = armijo_backtrack(f, v1(1), v1(-1), v1(2), 1.0, LineSearchConfig{});
  EXPECT_EQ(s.theta, 1.0);
  EXPECT_EQ(s.trials, 1);
}

TEST(Armijo, RejectsNonDescentDirection) {
  Square f;
  try {
    armijo_backtrack(f, v1(1), v1(1), v1(2), 1.0, LineSearchConfig{});
    FAIL();
  } catch (const LineSearchError& e) {
    EXPECT_EQ(e.kind(), LineSearchFailure::NotDescent);
  }
  EXPECT_EQ(f.calls, 0);
}

TEST(Armijo, TrialCountIsOnePlusBacktracks) {
  Square f;
  const Step s = armijo_backtrack(f, v1(1), v1(-100), v1(2), 1.0, LineSearchConfig{});
  // theta = 2^-k with |1 - 100 theta| small enough: first success at theta = 1/64.
  EXPECT_EQ(s.theta, 1.0 / 64.0);
  EXPECT_EQ(s.trials, 7);
  EXPECT_EQ(f.calls, s.trials);
  EXPECT_LT(s.f, 1.0);
}

TEST(Armijo, NonFiniteTrialsAreRejected) {
  auto f = [](const Eigen::VectorXd& x) { return x[0] < 0 ? std::numeric_limits<double>::infinity() : x[0] * x[0]; };
  const Step s = armijo_backtrack(f, v1(1), v1(-4), v1(2), 1.0, LineSearchConfig{});
  EXPECT_EQ(s.theta, 0.25);
}

TEST(Armijo, StepTooSmall) {
  auto f = [](const Eigen::VectorXd&) { return 1.0; };
  try {
    armijo_backtrack(f, v1(1), v1(-1), v1(2), 1.0, LineSearchConfig{});
    FAIL();
  } catch (const LineSearchError& e) {
    EXPECT_EQ(e.kind(), LineSearchFailure::StepTooSmall);
  }
}

TEST(Wolfe, HalfStepSatisfiesBothConditions) {
  auto fg = [](const Eigen::VectorXd& x) { return std::make_pair(x.squaredNorm(), Eigen::VectorXd(2.0 * x)); };
  const Step s = wolfe_search(fg, v1(1), v1(-2), v1(2), 1.0, LineSearchConfig{});
  EXPECT_EQ(s.theta, 0.5);
  EXPECT_EQ(s.f, 0.0);
  EXPECT_EQ(s.g[0], 0.0);
}

TEST(Wolfe, QuadraticWithUnitMinimizer) {
  // Starting at a short step the weak conditions already hold.
  // f = (x - 3)^2 / 2 + (y + 1)^2 from the origin along the Newton-like direction p = (3, -1).
  Eigen::Vector2d c(3, -1);
  auto fg = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd d = x - c;
    Eigen::VectorXd g(2);
    g << d[0], 2 * d[1];
    return std::make_pair(0.5 * d[0] * d[0] + d[1] * d[1], g);
  };
  const Eigen::VectorXd x = Eigen::Vector2d::Zero(), p = c;
  const auto [f0, g0] = fg(x);
  LineSearchConfig cfg;
  cfg.theta0 = 0.2;
  const Step s = wolfe_search(fg, x, p, g0, f0, cfg);
  EXPECT_LE(s.f, f0 + cfg.c1 * s.theta * g0.dot(p));
  EXPECT_GE(s.g.dot(p), cfg.c2 * g0.dot(p));
}

TEST(Wolfe, RejectsNonDescentDirection) {
  auto fg = [](const Eigen::VectorXd& x) { return std::make_pair(x.squaredNorm(), Eigen::VectorXd(2.0 * x)); };
  EXPECT_THROW(wolfe_search(fg, v1(1), v1(3), v1(2), 1.0, LineSearchConfig{}), LineSearchError);
}

TEST(LineSearchConfig, Validation) {
  LineSearchConfig c;
  c.rho = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.c2 = c.c1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
