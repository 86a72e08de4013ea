#pragma once

// Named problems, their text file format, and a counting evaluation context.
//
// File format (UTF-8, one problem per file, `key: value` lines; blank lines
// and lines starting with '#' are ignored):
//
//   name: rosenbrock_2
//   n: 2
//   objective: 100*(x2 - x1^2)^2 + (1 - x1)^2
//   x0: -1.2, 1
//   fstar: 0            (optional)

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "inthop/counters.hpp"
#include "inthop/expr.hpp"
#include "inthop/interval.hpp"

namespace inthop {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Problem {
  std::string name;
  int n = 0;
  Expr objective;
  std::vector<double> x0;
  std::optional<double> fstar;
};

class ProblemFileError : public std::runtime_error {
 public:
  ProblemFileError(const std::string& file, std::size_t line, const std::string& message)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + message),
        file_(file),
        line_(line) {}
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& s) {
  const std::string t = trim(s);
  double v = 0.0;
  auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty())
    throw std::invalid_argument("malformed real '" + t + "'");
  return v;
}

}  // namespace detail

// Parses problem text; `source` names the origin in error messages.
inline Problem parse_problem(std::istream& in, const std::string& source) {
  Problem p;
  std::string objective_text;
  std::string x0_text;
  std::size_t objective_line = 0;
  std::size_t x0_line = 0;
  std::size_t n_line = 0;
  bool have_n = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ProblemFileError(source, line_no, "expected 'key: value'");
    const std::string key = detail::trim(line.substr(0, colon));
    const std::string value = detail::trim(line.substr(colon + 1));
    try {
      if (key == "name") {
        p.name = value;
      } else if (key == "n") {
        std::size_t used = 0;
        const long n = std::stol(value, &used);
        if (used != value.size() || n <= 0) throw std::invalid_argument("n must be a positive integer");
        p.n = static_cast<int>(n);
        have_n = true;
        n_line = line_no;
      } else if (key == "objective") {
        objective_text = value;
        objective_line = line_no;
      } else if (key == "x0") {
        x0_text = value;
        x0_line = line_no;
      } else if (key == "fstar") {
        p.fstar = detail::parse_real(value);
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::exception& e) {
      throw ProblemFileError(source, line_no, e.what());
    }
  }
  if (p.name.empty()) throw ProblemFileError(source, line_no, "missing 'name'");
  if (!have_n) throw ProblemFileError(source, line_no, "missing 'n'");
  if (objective_line == 0) throw ProblemFileError(source, line_no, "missing 'objective'");
  if (x0_line == 0) throw ProblemFileError(source, line_no, "missing 'x0'");
  try {
    p.objective = parse_expr(objective_text, p.n);
  } catch (const ParseError& e) {
    throw ProblemFileError(source, objective_line, e.what());
  }
  std::stringstream ss(x0_text);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) p.x0.push_back(detail::parse_real(item));
  } catch (const std::exception& e) {
    throw ProblemFileError(source, x0_line, e.what());
  }
  if (p.x0.size() != static_cast<std::size_t>(p.n))
    throw ProblemFileError(source, x0_line,
                           "x0 has " + std::to_string(p.x0.size()) + " entries, expected n = " +
                               std::to_string(p.n) + " (declared on line " +
                               std::to_string(n_line) + ")");
  return p;
}

inline Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file " + path);
  return parse_problem(in, path);
}

// A problem together with its symbolic gradient and Hessian. Immutable and
// shareable across concurrent runs.
struct CompiledProblem {
  Problem problem;
  Derivatives derivatives;

  int n() const { return problem.n; }
  Vector start() const { return Eigen::Map<const Vector>(problem.x0.data(), problem.n); }
};

inline std::shared_ptr<const CompiledProblem> compile(Problem p) {
  auto cp = std::make_shared<CompiledProblem>();
  cp->derivatives = differentiate(p.objective, p.n);
  cp->problem = std::move(p);
  return cp;
}

inline std::span<const double> as_span(const Vector& x) {
  return {x.data(), static_cast<std::size_t>(x.size())};
}

inline Vector eval_gradient(const std::vector<Expr>& gradient, const Vector& x) {
  Vector g(static_cast<Eigen::Index>(gradient.size()));
  for (std::size_t i = 0; i < gradient.size(); ++i)
    g[static_cast<Eigen::Index>(i)] = eval_scalar(gradient[i], as_span(x));
  return g;
}

inline Matrix eval_hessian(const HessianExprs& h, const Vector& x) {
  const auto n = static_cast<Eigen::Index>(h.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      const Expr& e = h(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      const double v = e.is_const() ? e.const_value() : eval_scalar(e, as_span(x));
      m(i, j) = v;
      m(j, i) = v;
    }
  return m;
}

inline IntervalMatrix interval_hessian(const HessianExprs& h, const IntervalVector& box) {
  if (box.size() != h.size()) throw std::invalid_argument("box dimension mismatch");
  const std::size_t n = h.size();
  IntervalMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const Expr& e = h(i, j);
      const Interval v = e.is_const() ? Interval(e.const_value()) : eval_interval(e, box);
      m(i, j) = v;
      m(j, i) = v;
    }
  return m;
}

// Evaluation handle for one run: every call is charged to the run's ledger.
class Objective {
 public:
  Objective(const CompiledProblem& problem, Counters& counters)
      : problem_(problem), counters_(counters) {}

  int n() const { return problem_.n(); }
  const CompiledProblem& problem() const { return problem_; }
  Counters& counters() { return counters_; }

  double value(const Vector& x) {
    ++counters_.f_evals;
    return eval_scalar(problem_.problem.objective, as_span(x));
  }
  Vector gradient(const Vector& x) {
    ++counters_.g_evals;
    return eval_gradient(problem_.derivatives.gradient, x);
  }
  Matrix hessian(const Vector& x) {
    ++counters_.h_evals;
    return eval_hessian(problem_.derivatives.hessian, x);
  }
  IntervalMatrix interval_hessian(const IntervalVector& box) {
    ++counters_.ih_evals;
    return inthop::interval_hessian(problem_.derivatives.hessian, box);
  }

  // Point Hessian that is not charged: used for post-hoc status
  // classification, which is not part of any algorithm's work.
  Matrix hessian_uncounted(const Vector& x) const {
    return eval_hessian(problem_.derivatives.hessian, x);
  }

 private:
  const CompiledProblem& problem_;
  Counters& counters_;
};

}  // namespace inthop
