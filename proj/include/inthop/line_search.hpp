#pragma once

// Step-length selection: Armijo backtracking and a weak-Wolfe bisection
// search. Both reject trial points whose objective is non-finite or not
// strictly below f(x), so every accepted step strictly decreases f.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace inthop {

struct LineSearchConfig {
  double theta0 = 1.0;
  double rho = 0.5;
  double c1 = 1e-3;
  double c2 = 0.9;
  double theta_min = 1e-12;
  int max_trials = 50;  // Wolfe only

  void validate() const {
    if (!(0.0 < c1 && c1 < c2 && c2 < 1.0)) throw std::invalid_argument("need 0 < c1 < c2 < 1");
    if (!(0.0 < rho && rho < 1.0)) throw std::invalid_argument("need 0 < rho < 1");
    if (!(theta_min > 0.0) || !(theta0 >= theta_min)) throw std::invalid_argument("need 0 < theta_min <= theta0");
    if (max_trials < 1) throw std::invalid_argument("need max_trials >= 1");
  }
};

enum class LineSearchFailure { NotDescent, StepTooSmall, MaxTrialsExceeded };

class LineSearchError : public std::runtime_error {
 public:
  explicit LineSearchError(LineSearchFailure kind)
      : std::runtime_error(describe(kind)), kind_(kind) {}
  LineSearchFailure kind() const { return kind_; }

 private:
  static std::string describe(LineSearchFailure kind) {
    switch (kind) {
      case LineSearchFailure::NotDescent:
        return "search direction is not a descent direction";
      case LineSearchFailure::StepTooSmall:
        return "step length fell below the minimum";
      case LineSearchFailure::MaxTrialsExceeded:
        return "line search exceeded its trial budget";
    }
    return "line search failure";
  }
  LineSearchFailure kind_;
};

struct Step {
  double theta = 0.0;
  double f = 0.0;          // objective at the accepted point
  Eigen::VectorXd g;       // gradient there (Wolfe only; empty for Armijo)
  int trials = 0;
};

namespace detail {

inline bool sufficient_decrease(double f_trial, double fx, double c1, double theta, double slope) {
  return std::isfinite(f_trial) && f_trial <= fx + c1 * theta * slope && f_trial < fx;
}

}  // namespace detail

// Backtracking from theta0 by factor rho until the Armijo condition holds.
// `f` maps a point to the objective value and is expected to do its own
// evaluation counting; one call per trial.
template <class F>
Step armijo_backtrack(F&& f, const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                      const Eigen::VectorXd& g, double fx, const LineSearchConfig& cfg) {
  const double slope = g.dot(p);
  if (!(slope < 0.0)) throw LineSearchError(LineSearchFailure::NotDescent);
  Step step;
  for (double theta = cfg.theta0; theta >= cfg.theta_min; theta *= cfg.rho) {
    ++step.trials;
    const double ft = f(Eigen::VectorXd(x + theta * p));
    if (detail::sufficient_decrease(ft, fx, cfg.c1, theta, slope)) {
      step.theta = theta;
      step.f = ft;
      return step;
    }
  }
  throw LineSearchError(LineSearchFailure::StepTooSmall);
}

// Weak Wolfe conditions by bracketing and bisection. `fg` maps a point to
// std::pair<double, VectorXd> (value, gradient); one call per trial.
template <class FG>
Step wolfe_search(FG&& fg, const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                  const Eigen::VectorXd& g, double fx, const LineSearchConfig& cfg) {
  const double slope = g.dot(p);
  if (!(slope < 0.0)) throw LineSearchError(LineSearchFailure::NotDescent);
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double theta = cfg.theta0;
  Step step;
  while (step.trials < cfg.max_trials) {
    if (theta < cfg.theta_min) throw LineSearchError(LineSearchFailure::StepTooSmall);
    ++step.trials;
    auto [ft, gt] = fg(Eigen::VectorXd(x + theta * p));
    if (!detail::sufficient_decrease(ft, fx, cfg.c1, theta, slope)) {
      hi = theta;
    } else if (!(gt.dot(p) >= cfg.c2 * slope)) {
      lo = theta;
    } else {
      step.theta = theta;
      step.f = ft;
      step.g = std::move(gt);
      return step;
    }
    theta = std::isinf(hi) ? 2.0 * lo : 0.5 * (lo + hi);
  }
  throw LineSearchError(LineSearchFailure::MaxTrialsExceeded);
}

}  // namespace inthop
