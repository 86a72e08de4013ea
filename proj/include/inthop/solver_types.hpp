#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "inthop/counters.hpp"
#include "inthop/eigen_bounds.hpp"
#include "inthop/line_search.hpp"
#include "inthop/problem.hpp"

namespace inthop {

enum class Strategy { Fixed, A1, A2 };

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Fixed:
      return "fixed";
    case Strategy::A1:
      return "a1";
    case Strategy::A2:
      return "a2";
  }
  return "?";
}

inline Strategy parse_strategy(std::string_view s) {
  if (s == "fixed" || s == "f" || s == "F") return Strategy::Fixed;
  if (s == "a1" || s == "A1") return Strategy::A1;
  if (s == "a2" || s == "A2") return Strategy::A2;
  throw std::invalid_argument("unknown strategy '" + std::string(s) + "'");
}

enum class Status { Solved, MaxIterations, StepTooSmall, SaddlePoint, InfiniteStart, SingularHessian };

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::Solved:
      return "Solved";
    case Status::MaxIterations:
      return "MaxIterations";
    case Status::StepTooSmall:
      return "StepTooSmall";
    case Status::SaddlePoint:
      return "SaddlePoint";
    case Status::InfiniteStart:
      return "InfiniteStart";
    case Status::SingularHessian:
      return "SingularHessian";
  }
  return "?";
}

inline Status parse_status(std::string_view s) {
  for (Status st : {Status::Solved, Status::MaxIterations, Status::StepTooSmall, Status::SaddlePoint,
                    Status::InfiniteStart, Status::SingularHessian})
    if (to_string(st) == s) return st;
  throw std::invalid_argument("unknown status '" + std::string(s) + "'");
}

struct SolverConfig {
  double eps_g = 1e-3;
  double eps_H = 1e-3;
  int iter_max = 10000;
  double delta0 = 0.1;
  double r = 2.0;
  double beta = 1.0;
  double delta_min = 1e-3;
  double delta_max = 10.0;
  AlphaMethod alpha_method = AlphaMethod::MK;
  Strategy strategy = Strategy::A1;
  EMatrix e_matrix = EMatrix::Diagonal;
  LineSearchConfig line_search;
  bool ridge_fallback = false;
  // Newton-CAMI: Cholesky attempts allowed in one iteration.
  long cami_max_attempts = 1'000'000;
  // Records lambda_min of the refresh-point Hessian for step-norm checks.
  // Not charged to the ledger.
  bool diagnostics = false;

  void validate() const {
    if (!(eps_g > 0.0)) throw std::invalid_argument("eps_g must be positive");
    if (!(eps_H > 0.0)) throw std::invalid_argument("eps_H must be positive");
    if (iter_max < 0) throw std::invalid_argument("iter_max must be nonnegative");
    if (!(0.0 < delta_min && delta_min <= delta0 && delta0 <= delta_max))
      throw std::invalid_argument("need 0 < delta_min <= delta0 <= delta_max");
    if (!(r > 0.0)) throw std::invalid_argument("r must be positive");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (cami_max_attempts < 1) throw std::invalid_argument("cami_max_attempts must be positive");
    line_search.validate();
  }
};

struct IterationRecord {
  long k = 0;
  long t = 0;
  double f = 0.0;       // f(x_k)
  double gnorm = 0.0;   // ||g_k||
  double delta = 0.0;   // box width in force (NaN for solvers without boxes)
  bool refreshed = false;
  double theta = 0.0;
  double slope = 0.0;   // g_k^T p_k
  double f_next = 0.0;  // f(x_{k+1})
  double pnorm = 0.0;   // ||p_k||
  // lambda_min(Hessian at the refresh point) + 2 alpha, when diagnostics are on.
  double curvature_floor = std::numeric_limits<double>::quiet_NaN();
  long attempts = 0;    // Newton-CAMI Cholesky attempts this iteration
};

struct SolverResult {
  Eigen::VectorXd x_final;
  double f_final = 0.0;
  double g_norm = 0.0;
  Status status = Status::MaxIterations;
  Counters counters;
  std::vector<IterationRecord> trace;
  bool saddle_checked = false;
  double lambda_min_final = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// Terminal classification when the gradient test passed: the exact Hessian
// at the final point is inspected (its eigensolve is charged; the Hessian
// evaluation itself is not counted as algorithm work).
inline void classify_stationary(Objective& obj, SolverResult& result, double eps_H) {
  const Eigen::MatrixXd h = obj.hessian_uncounted(result.x_final);
  result.saddle_checked = true;
  try {
    result.lambda_min_final = sym_eigen(h, obj.counters())[0];
  } catch (const NonFiniteMatrix&) {
    result.status = Status::SingularHessian;
    return;
  }
  result.status = result.lambda_min_final < -eps_H ? Status::SaddlePoint : Status::Solved;
}

}  // namespace detail

}  // namespace inthop
