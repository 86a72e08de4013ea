#pragma once

// Sampling-based runtime checks:
//  - interval Hessian enclosure of point Hessians over random boxes,
//  - soundness of the GGN / EM / MK eigenvalue lower bounds,
//  - the underestimator closeness bounds around a refresh point x_t
//    (function value, gradient, Hessian), with Lipschitz constants and
//    lambda_min estimated from samples,
//  - the step-norm bound ||p_k|| <= ||g_k|| / (lambda_min(H(x_t)) + 2 alpha)
//    along INTHOP traces.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "inthop/eigen_bounds.hpp"
#include "inthop/inthop_solver.hpp"
#include "inthop/interval.hpp"
#include "inthop/problem.hpp"

namespace inthop::diagnostics {

struct Tally {
  long checked = 0;
  long violated = 0;
  long skipped = 0;
  // Largest lhs / rhs seen; > 1 means a violation.
  double worst_ratio = 0.0;

  void record(double lhs, double rhs, double rel_slack) {
    ++checked;
    if (lhs > rhs * (1.0 + rel_slack) + 1e-300) ++violated;
    if (rhs > 0.0)
      worst_ratio = std::max(worst_ratio, lhs / rhs);
    else if (lhs > 0.0)
      worst_ratio = std::numeric_limits<double>::infinity();
  }
  void merge(const Tally& o) {
    checked += o.checked;
    violated += o.violated;
    skipped += o.skipped;
    worst_ratio = std::max(worst_ratio, o.worst_ratio);
  }
  bool ok() const { return violated == 0; }
};

namespace detail {

inline Eigen::VectorXd uniform_in_box(const IntervalVector& box, std::mt19937_64& rng) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(box.size()));
  for (std::size_t i = 0; i < box.size(); ++i)
    x[static_cast<Eigen::Index>(i)] = std::uniform_real_distribution<double>(box[i].lo(), box[i].hi())(rng);
  return x;
}

inline IntervalVector random_box(const Eigen::VectorXd& around, double spread, double width, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> shift(-spread, spread);
  Eigen::VectorXd c = around;
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] += shift(rng);
  return make_box(c, width);
}

inline double spectral_norm(const Eigen::MatrixXd& m) { return spectral_radius(0.5 * (m + m.transpose())); }

}  // namespace detail

// ------------------------------------------------ interval Hessian enclosure

struct EnclosureConfig {
  int boxes = 50;
  int points_per_box = 200;
  double max_width = 1.0;
  double spread = 1.0;  // box centres lie within this distance of x0 per coordinate
  std::uint64_t seed = 7;
};

// Entrywise containment of sampled point Hessians in the interval Hessian.
// Boxes on which the interval extension is undefined are counted as skipped.
inline Tally check_hessian_enclosure(const CompiledProblem& p, const EnclosureConfig& cfg = {}) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> width(0.01 * cfg.max_width, cfg.max_width);
  Tally tally;
  const auto n = static_cast<std::size_t>(p.n());
  for (int b = 0; b < cfg.boxes; ++b) {
    const IntervalVector box = detail::random_box(p.start(), cfg.spread, width(rng), rng);
    IntervalMatrix ih;
    try {
      ih = interval_hessian(p.derivatives.hessian, box);
    } catch (const std::domain_error&) {
      ++tally.skipped;
      continue;
    }
    for (int s = 0; s < cfg.points_per_box; ++s) {
      const Eigen::MatrixXd h = eval_hessian(p.derivatives.hessian, detail::uniform_in_box(box, rng));
      ++tally.checked;
      bool inside = true;
      for (std::size_t i = 0; i < n && inside; ++i)
        for (std::size_t j = i; j < n && inside; ++j)
          inside = ih(i, j).contains(h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      if (!inside) ++tally.violated;
    }
  }
  return tally;
}

// ----------------------------------------------------- eigen-bound soundness

struct SoundnessReport {
  Tally ggn;
  Tally em;
  Tally mk;
  Tally ggn_vertex;
  Tally em_vertex;
  Tally mk_vertex;
  bool ok() const {
    return ggn.ok() && em.ok() && mk.ok() && ggn_vertex.ok() && em_vertex.ok() && mk_vertex.ok();
  }
};

inline IntervalMatrix random_symmetric_interval_matrix(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> centre(-10.0, 10.0);
  std::uniform_real_distribution<double> radius(0.0, 5.0);
  IntervalMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double c = centre(rng);
      const double r = radius(rng);
      m(i, j) = Interval(c - r, c + r);
      m(j, i) = m(i, j);
    }
  return m;
}

inline Eigen::MatrixXd sample_point_matrix(const IntervalMatrix& a, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      const Interval& v = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      m(i, j) = std::uniform_real_distribution<double>(v.lo(), v.hi())(rng);
      m(j, i) = m(i, j);
    }
  return m;
}

// Smallest eigenvalue over all 2^(n(n+1)/2) endpoint matrices.
inline double vertex_lambda_min(const IntervalMatrix& a) {
  const std::size_t n = a.size();
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) slots.emplace_back(i, j);
  double best = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << slots.size()); ++mask) {
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const auto [i, j] = slots[s];
      const double v = (mask >> s) & 1U ? a(i, j).hi() : a(i, j).lo();
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
    best = std::min(best, lambda_min(m));
  }
  return best;
}

struct SoundnessConfig {
  int matrices = 500;
  int samples = 200;
  std::size_t max_n = 5;
  std::size_t vertex_max_n = 3;
  double rel_slack = 1e-12;  // eigensolver rounding
  std::uint64_t seed = 11;
};

inline SoundnessReport check_eigen_bounds(const SoundnessConfig& cfg = {}) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> dim(1, cfg.max_n);
  SoundnessReport rep;
  for (int m = 0; m < cfg.matrices; ++m) {
    const std::size_t n = dim(rng);
    const IntervalMatrix a = random_symmetric_interval_matrix(n, rng);
    const double ggn = lambda_min_ggn(a);
    const double em = lambda_min_em(a);
    const double mk = lambda_min_mk(a);
    double sampled = std::numeric_limits<double>::infinity();
    for (int s = 0; s < cfg.samples; ++s) sampled = std::min(sampled, lambda_min(sample_point_matrix(a, rng)));
    // bound <= truth, recorded as (bound - truth) <= 0 with a scale-aware slack
    auto rec = [&](Tally& t, double bound, double truth) {
      const double scale = 1.0 + std::abs(truth);
      ++t.checked;
      if (bound > truth + cfg.rel_slack * scale) ++t.violated;
      t.worst_ratio = std::max(t.worst_ratio, (bound - truth) / scale);
    };
    rec(rep.ggn, ggn, sampled);
    rec(rep.em, em, sampled);
    rec(rep.mk, mk, sampled);
    if (n <= cfg.vertex_max_n) {
      const double vertex = vertex_lambda_min(a);
      rec(rep.ggn_vertex, ggn, vertex);
      rec(rep.em_vertex, em, vertex);
      rec(rep.mk_vertex, mk, vertex);
    }
  }
  return rep;
}

// --------------------------------------------- underestimator closeness bounds

struct CloseBoundsConfig {
  int boxes = 10;
  int pairs_per_box = 20;
  int samples_per_box = 200;
  double min_width = 0.05;
  double max_width = 1.0;
  double spread = 1.0;
  double rel_slack = 1e-8;
  std::uint64_t seed = 5;
};

struct CloseBoundsReport {
  Tally function;
  Tally gradient;
  Tally hessian;
  bool ok() const { return function.ok() && gradient.ok() && hessian.ok(); }
};

// For boxes of width delta centred at x_t, checks for sampled x_k in the box
//   |L(x_t) - f(x_k)|           <= (L_f/2) sqrt(n) delta + (|lmin|/8) n delta^2
//   ||grad L(x_t) - g(x_k)||    <= (L_g/2) sqrt(n) delta + (|lmin|/2) sqrt(n) delta
//   ||H(x_t) + 2 alpha I - H(x_k)||_2 <= (L_H/2) sqrt(n) delta + (|lmin|/2) sqrt(n)
// where alpha = max(0, -lmin/2), lmin is the smallest Hessian eigenvalue seen
// in the box and L_f, L_g, L_H are the largest difference quotients between
// x_t and the sampled points (the checked x_k included).
inline CloseBoundsReport check_close_bounds(const CompiledProblem& p, const CloseBoundsConfig& cfg = {}) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> width(cfg.min_width, cfg.max_width);
  CloseBoundsReport rep;
  const double n = static_cast<double>(p.n());
  const double sqrt_n = std::sqrt(n);
  const Expr& f = p.problem.objective;
  for (int b = 0; b < cfg.boxes; ++b) {
    const double delta = width(rng);
    const IntervalVector box = detail::random_box(p.start(), cfg.spread, delta, rng);
    Eigen::VectorXd x_t(static_cast<Eigen::Index>(box.size()));
    for (std::size_t i = 0; i < box.size(); ++i) x_t[static_cast<Eigen::Index>(i)] = box[i].mid();
    const double f_t = eval_scalar(f, as_span(x_t));
    const Eigen::VectorXd g_t = eval_gradient(p.derivatives.gradient, x_t);
    const Eigen::MatrixXd h_t = eval_hessian(p.derivatives.hessian, x_t);
    if (!std::isfinite(f_t) || !g_t.allFinite() || !h_t.allFinite()) {
      ++rep.function.skipped;
      continue;
    }

    std::vector<Eigen::VectorXd> pts;
    for (int s = 0; s < cfg.samples_per_box + cfg.pairs_per_box; ++s) pts.push_back(detail::uniform_in_box(box, rng));

    double lf = 0.0, lg = 0.0, lh = 0.0;
    double lmin = lambda_min(h_t);
    std::vector<double> fs, dist;
    std::vector<Eigen::VectorXd> gs;
    std::vector<Eigen::MatrixXd> hs;
    for (const auto& x : pts) {
      const double fx = eval_scalar(f, as_span(x));
      const Eigen::VectorXd gx = eval_gradient(p.derivatives.gradient, x);
      const Eigen::MatrixXd hx = eval_hessian(p.derivatives.hessian, x);
      const double d = (x - x_t).norm();
      lmin = std::min(lmin, lambda_min(hx));
      if (d > 0.0) {
        lf = std::max(lf, std::abs(fx - f_t) / d);
        lg = std::max(lg, (gx - g_t).norm() / d);
        lh = std::max(lh, detail::spectral_norm(hx - h_t) / d);
      }
      fs.push_back(fx);
      gs.push_back(gx);
      hs.push_back(hx);
    }
    const double alpha = alpha_from_lambda(lmin);
    const double abs_l = std::abs(lmin);
    const double under_t = f_t - alpha * n * delta * delta / 4.0;  // L(x_t); x_t is the box centre
    const Eigen::MatrixXd shifted = h_t + 2.0 * alpha * Eigen::MatrixXd::Identity(p.n(), p.n());
    // The last pairs_per_box points are the checked x_k.
    for (std::size_t s = static_cast<std::size_t>(cfg.samples_per_box); s < pts.size(); ++s) {
      rep.function.record(std::abs(under_t - fs[s]), lf / 2.0 * sqrt_n * delta + abs_l / 8.0 * n * delta * delta,
                          cfg.rel_slack);
      rep.gradient.record((g_t - gs[s]).norm(), lg / 2.0 * sqrt_n * delta + abs_l / 2.0 * sqrt_n * delta,
                          cfg.rel_slack);
      rep.hessian.record(detail::spectral_norm(shifted - hs[s]), lh / 2.0 * sqrt_n * delta + abs_l / 2.0 * sqrt_n,
                         cfg.rel_slack);
    }
  }
  return rep;
}

// ------------------------------------------------------- step-norm bound

// ||p_k|| <= ||g_k|| / (lambda_min(H(x_t)) + 2 alpha) on every traced
// iteration whose curvature floor is positive. Needs a trace produced with
// SolverConfig::diagnostics enabled; other records are counted as skipped.
inline Tally check_step_norm_bound(const SolverResult& r, double rel_slack = 1e-8) {
  Tally t;
  for (const auto& it : r.trace) {
    if (!(it.curvature_floor > 0.0)) {
      ++t.skipped;
      continue;
    }
    t.record(it.pnorm, it.gnorm / it.curvature_floor, rel_slack);
  }
  return t;
}

}  // namespace inthop::diagnostics
