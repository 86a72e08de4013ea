#pragma once

// INTHOP: line search along p_k = -(H_t + 2 alpha I)^{-1} g_k, where H_t is
// the Hessian at the last refresh point x_t and alpha comes from a lower
// bound on the smallest eigenvalue of the interval Hessian over a box of
// width delta centred at x_t. The shifted matrix and its Cholesky factor are
// reused until an iterate leaves the box.
//
// Box width policies: Fixed (delta0 throughout), A1 (scaled by a step-norm
// ratio at each refresh) and A2 (grown or shrunk from the actual/model
// decrease ratio over the last box).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "inthop/eigen_bounds.hpp"
#include "inthop/interval.hpp"
#include "inthop/line_search.hpp"
#include "inthop/problem.hpp"
#include "inthop/solver_types.hpp"

namespace inthop {

class SingularHessian : public std::runtime_error {
 public:
  SingularHessian() : std::runtime_error("shifted Hessian is not positive definite") {}
};

// [x - delta/2, x + delta/2] in every coordinate.
inline IntervalVector make_box(const Eigen::VectorXd& x, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("box width must be positive");
  IntervalVector box;
  box.reserve(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) box.emplace_back(x[i] - 0.5 * delta, x[i] + 0.5 * delta);
  return box;
}

struct HessianState {
  long t = 0;
  IntervalVector box;
  double delta = 0.0;
  Eigen::VectorXd center;
  double lambda_bound = 0.0;
  double alpha = 0.0;
  SymMatrix shifted;  // H(x_t) + 2 alpha I
  Eigen::LLT<SymMatrix> factor;
  // lambda_min(H(x_t)) + 2 alpha; only filled when diagnostics are on.
  double curvature_floor = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline bool factorize(const SymMatrix& m, Eigen::LLT<SymMatrix>& out) {
  if (!m.allFinite()) return false;
  out.compute(m);
  return out.info() == Eigen::Success;
}

}  // namespace detail

// Builds the box, interval Hessian, shift and factorization at x_t.
inline HessianState refresh_hessian(Objective& obj, const Eigen::VectorXd& x_t, double delta,
                                    const SolverConfig& cfg) {
  HessianState s;
  s.delta = delta;
  s.center = x_t;
  s.box = make_box(x_t, delta);
  Counters& ledger = obj.counters();
  const SymMatrix h = obj.hessian(x_t);
  const IntervalMatrix ih = obj.interval_hessian(s.box);
  s.lambda_bound = lambda_min_bound(ih, cfg.alpha_method, ledger, cfg.e_matrix);
  s.alpha = alpha_from_lambda(s.lambda_bound);
  const auto n = h.rows();
  s.shifted = h + 2.0 * s.alpha * SymMatrix::Identity(n, n);
  ++ledger.n3_ops;
  if (!detail::factorize(s.shifted, s.factor)) {
    if (!cfg.ridge_fallback) throw SingularHessian();
    const double ridge = 1e-8 * (1.0 + s.shifted.cwiseAbs().maxCoeff());
    s.alpha += 0.5 * ridge;
    s.shifted.diagonal().array() += ridge;
    ++ledger.n3_ops;
    if (!detail::factorize(s.shifted, s.factor)) throw SingularHessian();
  }
  if (cfg.diagnostics) s.curvature_floor = lambda_min(h) + 2.0 * s.alpha;
  return s;
}

inline Eigen::VectorXd search_direction(const HessianState& state, const Eigen::VectorXd& g) {
  return -state.factor.solve(g);
}

// Step-norm ratio eta = (r / sqrt(n)) * ||p||_1 / sqrt(||p||_2^2 + beta).
inline double a1_ratio(const Eigen::VectorXd& p_prev, const SolverConfig& cfg) {
  const double n = static_cast<double>(p_prev.size());
  return cfg.r / std::sqrt(n) * p_prev.lpNorm<1>() / std::sqrt(p_prev.squaredNorm() + cfg.beta);
}

inline double update_delta_a1(const Eigen::VectorXd& p_prev, double delta_prev, const SolverConfig& cfg) {
  return std::clamp(delta_prev * a1_ratio(p_prev, cfg), cfg.delta_min, cfg.delta_max);
}

// Actual over model decrease across the last box. The model term is
// g_t^T s + s^T L_t s. NaN when the model decrease is zero or non-finite.
inline double a2_ratio(double f_t, double f_next, const Eigen::VectorXd& g_t, const Eigen::VectorXd& s,
                       const SymMatrix& shifted) {
  const double model = -(g_t.dot(s) + s.dot(shifted * s));
  if (model == 0.0 || !std::isfinite(model)) return std::numeric_limits<double>::quiet_NaN();
  return (f_t - f_next) / model;
}

inline double update_delta_from_ratio(double xi, double delta_prev, const SolverConfig& cfg) {
  if (std::isnan(xi) || xi < 0.25) return std::max(0.5 * delta_prev, cfg.delta_min);
  if (xi > 0.75) return std::min(4.0 * delta_prev, cfg.delta_max);
  return delta_prev;
}

inline double update_delta_a2(double f_t, double f_next, const Eigen::VectorXd& g_t, const Eigen::VectorXd& s,
                              const SymMatrix& shifted, double delta_prev, const SolverConfig& cfg) {
  return update_delta_from_ratio(a2_ratio(f_t, f_next, g_t, s, shifted), delta_prev, cfg);
}

inline SolverResult run_inthop(const CompiledProblem& problem, const SolverConfig& cfg) {
  cfg.validate();
  SolverResult result;
  Objective obj(problem, result.counters);
  Counters& c = result.counters;

  Eigen::VectorXd x = problem.start();
  double f = obj.value(x);
  result.x_final = x;
  result.f_final = f;
  if (!std::isfinite(f)) {
    result.status = Status::InfiniteStart;
    result.g_norm = std::numeric_limits<double>::quiet_NaN();
    return result;
  }
  Eigen::VectorXd g = obj.gradient(x);

  std::optional<HessianState> state;
  double delta = cfg.delta0;
  double f_t = f;
  Eigen::VectorXd g_t = g;
  Eigen::VectorXd p_prev;

  for (long k = 0;; ++k) {
    const double gnorm = g.norm();
    result.x_final = x;
    result.f_final = f;
    result.g_norm = gnorm;
    if (gnorm < cfg.eps_g) {
      detail::classify_stationary(obj, result, cfg.eps_H);
      return result;
    }
    if (k > cfg.iter_max) {
      result.status = Status::MaxIterations;
      return result;
    }

    bool refreshed = false;
    if (k == 0 || !box_contains(state->box, x)) {
      if (k > 0) {
        if (cfg.strategy == Strategy::A1) {
          delta = update_delta_a1(p_prev, delta, cfg);
        } else if (cfg.strategy == Strategy::A2) {
          delta = update_delta_a2(f_t, f, g_t, x - state->center, state->shifted, delta, cfg);
        }
      }
      const long t = state ? state->t + 1 : 1;
      ++c.refreshes;
      try {
        state = refresh_hessian(obj, x, delta, cfg);
      } catch (const SingularHessian&) {
        result.status = Status::SingularHessian;
        return result;
      } catch (const std::domain_error&) {
        // Interval Hessian undefined over the box (e.g. log reaching 0).
        result.status = Status::SingularHessian;
        return result;
      }
      state->t = t;
      f_t = f;
      g_t = g;
      refreshed = true;
    }

    const Eigen::VectorXd p = search_direction(*state, g);
    IterationRecord rec;
    rec.k = k;
    rec.t = state->t;
    rec.f = f;
    rec.gnorm = gnorm;
    rec.delta = state->delta;
    rec.refreshed = refreshed;
    rec.slope = g.dot(p);
    rec.pnorm = p.norm();
    rec.curvature_floor = state->curvature_floor;

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
    p_prev = p;
    ++c.iterations;
    rec.theta = step.theta;
    rec.f_next = f;
    result.trace.push_back(rec);
  }
}

}  // namespace inthop
