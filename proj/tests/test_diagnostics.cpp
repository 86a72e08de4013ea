#include <gtest/gtest.h>

#include "inthop/bench.hpp"
#include "inthop/diagnostics.hpp"

using namespace inthop;
namespace dg = inthop::diagnostics;

TEST(Tally, RecordsViolationsWithRelativeSlack) {
  dg::Tally t;
  t.record(1.0, 1.0, 1e-8);
  t.record(1.0 + 1e-9, 1.0, 1e-8);
  EXPECT_TRUE(t.ok());
  t.record(1.1, 1.0, 1e-8);
  EXPECT_FALSE(t.ok());
  EXPECT_EQ(t.checked, 3);
  EXPECT_EQ(t.violated, 1);
  EXPECT_NEAR(t.worst_ratio, 1.1, 1e-12);
}

TEST(Enclosure, HoldsOnEveryCorpusProblem) {
  for (const auto& p : load_problem_set(INTHOP_CORPUS_DIR)) {
    dg::EnclosureConfig cfg;
    if (p.n > 10) {
      cfg.boxes = 3;
      cfg.points_per_box = 5;
    }
    const auto t = dg::check_hessian_enclosure(*compile(p), cfg);
    EXPECT_TRUE(t.ok()) << p.name;
    EXPECT_GT(t.checked, 0) << p.name;
  }
}

TEST(StepNorm, BoundHoldsOnInthopRuns) {
  for (const char* name : {"rosenbrock_2", "himmelblau", "wood", "six_hump_camel"}) {
    const auto c = compile(load_problem(std::string(INTHOP_CORPUS_DIR) + "/" + name + ".prob"));
    SolverConfig cfg;
    cfg.diagnostics = true;
    const auto t = dg::check_step_norm_bound(run_inthop(*c, cfg));
    EXPECT_TRUE(t.ok()) << name;
    EXPECT_GT(t.checked, 0) << name;
  }
}

TEST(CloseBounds, ConvexProblemsSatisfyAllThreeBounds) {
  // With lambda_min >= 0 there is no shift, and every bound reduces to a
  // Lipschitz estimate over the sampled points.
  for (const char* name : {"sphere_2", "booth", "ill_quadratic_2", "pseudo_huber_5"}) {
    const auto c = compile(load_problem(std::string(INTHOP_CORPUS_DIR) + "/" + name + ".prob"));
    const auto rep = dg::check_close_bounds(*c);
    EXPECT_TRUE(rep.ok()) << name;
  }
}

TEST(CloseBounds, ValueAndGradientBoundsHoldOnNonconvexProblems) {
  for (const char* name : {"rosenbrock_2", "himmelblau", "six_hump_camel", "wood", "styblinski_tang_4"}) {
    const auto c = compile(load_problem(std::string(INTHOP_CORPUS_DIR) + "/" + name + ".prob"));
    const auto rep = dg::check_close_bounds(*c);
    EXPECT_TRUE(rep.function.ok()) << name;
    EXPECT_TRUE(rep.gradient.ok()) << name;
  }
}
