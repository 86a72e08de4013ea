#pragma once

// Reference solvers sharing INTHOP's counting and termination rules:
// steepest descent (Armijo), BFGS on the inverse Hessian (weak Wolfe), and
// Newton's method with Cholesky-checked shifts tau*I, tau = 0, 1, 2, ...

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <utility>

#include "inthop/line_search.hpp"
#include "inthop/problem.hpp"
#include "inthop/solver_types.hpp"

namespace inthop {

namespace detail {

// Shared preamble: evaluates f(x0); returns false (status set) when it is not finite.
inline bool start_run(Objective& obj, SolverResult& result, Eigen::VectorXd& x, double& f) {
  x = obj.problem().start();
  f = obj.value(x);
  result.x_final = x;
  result.f_final = f;
  if (!std::isfinite(f)) {
    result.status = Status::InfiniteStart;
    result.g_norm = std::numeric_limits<double>::quiet_NaN();
    return false;
  }
  return true;
}

// Updates the result snapshot and applies the gradient and iteration tests.
// Returns true when the run is over.
inline bool terminal(Objective& obj, SolverResult& result, const Eigen::VectorXd& x, double f,
                     double gnorm, long k, const SolverConfig& cfg) {
  result.x_final = x;
  result.f_final = f;
  result.g_norm = gnorm;
  if (gnorm < cfg.eps_g) {
    classify_stationary(obj, result, cfg.eps_H);
    return true;
  }
  if (k > cfg.iter_max) {
    result.status = Status::MaxIterations;
    return true;
  }
  return false;
}

}  // namespace detail

inline SolverResult steepest_descent(const CompiledProblem& problem, const SolverConfig& cfg) {
  cfg.validate();
  SolverResult result;
  Objective obj(problem, result.counters);
  Eigen::VectorXd x;
  double f = 0.0;
  if (!detail::start_run(obj, result, x, f)) return result;
  Eigen::VectorXd g = obj.gradient(x);
  for (long k = 0;; ++k) {
    const double gnorm = g.norm();
    if (detail::terminal(obj, result, x, f, gnorm, k, cfg)) return result;
    const Eigen::VectorXd p = -g;
    IterationRecord rec;
    rec.k = k;
    rec.f = f;
    rec.gnorm = gnorm;
    rec.delta = std::numeric_limits<double>::quiet_NaN();
    rec.slope = g.dot(p);
    rec.pnorm = p.norm();
    Step step;
    try {
      step = armijo_backtrack([&](const Eigen::VectorXd& y) { return obj.value(y); }, x, p, g, f,
                              cfg.line_search);
    } catch (const LineSearchError&) {
      result.status = Status::StepTooSmall;
      return result;
    }
    x += step.theta * p;
    f = step.f;
    g = obj.gradient(x);
    ++result.counters.iterations;
    rec.theta = step.theta;
    rec.f_next = f;
    result.trace.push_back(rec);
  }
}

// Inverse BFGS update of h in place. Skipped (returns false) when the
// curvature s^T y is not safely positive.
inline bool bfgs_inverse_update(Eigen::MatrixXd& h, const Eigen::VectorXd& s, const Eigen::VectorXd& y) {
  const double sy = s.dot(y);
  if (!(sy > 1e-10 * s.norm() * y.norm())) return false;
  const double rho = 1.0 / sy;
  const Eigen::VectorXd hy = h * y;
  // (I - rho s y^T) H (I - rho y s^T) + rho s s^T, expanded.
  h += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
  h = 0.5 * (h + h.transpose()).eval();
  return true;
}

inline SolverResult bfgs(const CompiledProblem& problem, const SolverConfig& cfg,
                         Eigen::MatrixXd* inverse_hessian_out = nullptr) {
  cfg.validate();
  SolverResult result;
  Objective obj(problem, result.counters);
  Eigen::VectorXd x;
  double f = 0.0;
  if (!detail::start_run(obj, result, x, f)) return result;
  Eigen::VectorXd g = obj.gradient(x);
  const auto n = x.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  auto finish = [&]() -> SolverResult {
    if (inverse_hessian_out) *inverse_hessian_out = h;
    return std::move(result);
  };
  for (long k = 0;; ++k) {
    const double gnorm = g.norm();
    if (detail::terminal(obj, result, x, f, gnorm, k, cfg)) return finish();
    const Eigen::VectorXd p = -(h * g);
    IterationRecord rec;
    rec.k = k;
    rec.f = f;
    rec.gnorm = gnorm;
    rec.delta = std::numeric_limits<double>::quiet_NaN();
    rec.slope = g.dot(p);
    rec.pnorm = p.norm();
    Step step;
    try {
      step = wolfe_search(
          [&](const Eigen::VectorXd& y) { return std::make_pair(obj.value(y), obj.gradient(y)); }, x, p, g, f,
          cfg.line_search);
    } catch (const LineSearchError&) {
      result.status = Status::StepTooSmall;
      return finish();
    }
    const Eigen::VectorXd s = step.theta * p;
    x += s;
    const Eigen::VectorXd y = step.g - g;
    f = step.f;
    g = std::move(step.g);
    bfgs_inverse_update(h, s, y);
    ++result.counters.iterations;
    rec.theta = step.theta;
    rec.f_next = f;
    result.trace.push_back(rec);
  }
}

struct CamiState {
  double tau = 0.0;
  long attempts = 0;
  bool success = false;
  Eigen::LLT<Eigen::MatrixXd> factor;
};

// Cholesky of h + tau I for tau = 0, 1, 2, ... until all pivots are strictly
// positive or max_attempts is reached. One ledger unit per attempt.
inline CamiState cami_factorize(const Eigen::MatrixXd& h, long max_attempts, Counters& ledger) {
  CamiState st;
  if (!h.allFinite()) return st;
  const auto n = h.rows();
  while (st.attempts < max_attempts) {
    ++st.attempts;
    ++ledger.n3_ops;
    st.factor.compute(h + st.tau * Eigen::MatrixXd::Identity(n, n));
    if (st.factor.info() == Eigen::Success) {
      st.success = true;
      return st;
    }
    st.tau += 1.0;
  }
  return st;
}

inline SolverResult newton_cami(const CompiledProblem& problem, const SolverConfig& cfg) {
  cfg.validate();
  SolverResult result;
  Objective obj(problem, result.counters);
  Eigen::VectorXd x;
  double f = 0.0;
  if (!detail::start_run(obj, result, x, f)) return result;
  Eigen::VectorXd g = obj.gradient(x);
  for (long k = 0;; ++k) {
    const double gnorm = g.norm();
    if (detail::terminal(obj, result, x, f, gnorm, k, cfg)) return result;
    const Eigen::MatrixXd h = obj.hessian(x);
    CamiState cami = cami_factorize(h, cfg.cami_max_attempts, result.counters);
    if (!cami.success) {
      result.status = Status::SingularHessian;
      return result;
    }
    ++result.counters.n3_ops;  // solve with the accepted factor
    const Eigen::VectorXd p = -cami.factor.solve(g);
    IterationRecord rec;
    rec.k = k;
    rec.f = f;
    rec.gnorm = gnorm;
    rec.delta = std::numeric_limits<double>::quiet_NaN();
    rec.slope = g.dot(p);
    rec.pnorm = p.norm();
    rec.attempts = cami.attempts;
    Step step;
    try {
      step = armijo_backtrack([&](const Eigen::VectorXd& y) { return obj.value(y); }, x, p, g, f,
                              cfg.line_search);
    } catch (const LineSearchError&) {
      result.status = Status::StepTooSmall;
      return result;
    }
    x += step.theta * p;
    f = step.f;
    g = obj.gradient(x);
    ++result.counters.iterations;
    rec.theta = step.theta;
    rec.f_next = f;
    result.trace.push_back(rec);
  }
}

}  // namespace inthop
