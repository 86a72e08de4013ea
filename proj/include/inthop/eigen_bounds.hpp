#pragma once

// Dense symmetric eigenvalues and lower bounds on the smallest eigenvalue of
// a symmetric interval matrix.
//
//   GGN  interval Gerschgorin, O(n^2)
//   EM   midpoint/radius bound lambda_min(A~_M + E) - rho(dA~ + |E|), O(n^3)
//   MK   endpoint bound lambda_min(A_lo) - rho(A_hi - A_lo), O(n^3)
//
// The O(n^3) bounds charge one ledger unit per call when given a Counters.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include "inthop/counters.hpp"
#include "inthop/interval.hpp"

namespace inthop {

using SymMatrix = Eigen::MatrixXd;

class NonFiniteMatrix : public std::domain_error {
 public:
  NonFiniteMatrix() : std::domain_error("matrix has non-finite entries") {}
};

// Ascending eigenvalues of a symmetric matrix (lower triangle is read).
inline Eigen::VectorXd sym_eigen(const SymMatrix& m) {
  if (!m.allFinite()) throw NonFiniteMatrix();
  if (m.rows() == 0) return Eigen::VectorXd();
  Eigen::SelfAdjointEigenSolver<SymMatrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("symmetric eigensolver did not converge");
  return solver.eigenvalues();
}

inline Eigen::VectorXd sym_eigen(const SymMatrix& m, Counters& ledger) {
  ++ledger.n3_ops;
  return sym_eigen(m);
}

inline double lambda_min(const SymMatrix& m) { return sym_eigen(m)[0]; }

inline double spectral_radius(const SymMatrix& m) {
  const Eigen::VectorXd ev = sym_eigen(m);
  return std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
}

enum class AlphaMethod { GGN, EM, MK };

inline std::string_view to_string(AlphaMethod m) {
  switch (m) {
    case AlphaMethod::GGN:
      return "ggn";
    case AlphaMethod::EM:
      return "em";
    case AlphaMethod::MK:
      return "mk";
  }
  return "?";
}

inline AlphaMethod parse_alpha_method(std::string_view s) {
  if (s == "ggn" || s == "GGN") return AlphaMethod::GGN;
  if (s == "em" || s == "EM") return AlphaMethod::EM;
  if (s == "mk" || s == "MK") return AlphaMethod::MK;
  throw std::invalid_argument("unknown alpha method '" + std::string(s) + "'");
}

// Choice of E in the EM bound. Diagonal (E = diag(dA)) reduces the bound to
// lambda_min(A_M) - rho(dA); Full uses E = dA.
enum class EMatrix { Diagonal, Full };

namespace detail {

inline SymMatrix lower_matrix(const IntervalMatrix& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  SymMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).lo();
  return m;
}

inline SymMatrix upper_matrix(const IntervalMatrix& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  SymMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).hi();
  return m;
}

}  // namespace detail

inline double lambda_min_ggn(const IntervalMatrix& a) {
  const std::size_t n = a.size();
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double row = a(i, i).lo();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) row -= a(i, j).mag();
    bound = std::min(bound, row);
  }
  return bound;
}

inline double lambda_min_em(const IntervalMatrix& a, EMatrix e_choice = EMatrix::Diagonal) {
  const auto n = static_cast<Eigen::Index>(a.size());
  SymMatrix mid_mod(n, n);   // A~_M + E
  SymMatrix rad_mod(n, n);   // dA~ + |E|
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const Interval& v = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      const bool diag = i == j;
      const double e = (diag || e_choice == EMatrix::Full) ? v.rad() : 0.0;
      mid_mod(i, j) = (diag ? v.lo() : v.mid()) + e;
      rad_mod(i, j) = (diag ? 0.0 : v.rad()) + std::abs(e);
    }
  return lambda_min(mid_mod) - spectral_radius(rad_mod);
}

inline double lambda_min_em(const IntervalMatrix& a, Counters& ledger,
                            EMatrix e_choice = EMatrix::Diagonal) {
  ++ledger.n3_ops;
  return lambda_min_em(a, e_choice);
}

inline double lambda_min_mk(const IntervalMatrix& a) {
  const SymMatrix lo = detail::lower_matrix(a);
  const SymMatrix hi = detail::upper_matrix(a);
  return lambda_min(lo) - spectral_radius(hi - lo);
}

inline double lambda_min_mk(const IntervalMatrix& a, Counters& ledger) {
  ++ledger.n3_ops;
  return lambda_min_mk(a);
}

inline double lambda_min_bound(const IntervalMatrix& a, AlphaMethod method, Counters& ledger,
                               EMatrix e_choice = EMatrix::Diagonal) {
  switch (method) {
    case AlphaMethod::GGN:
      return lambda_min_ggn(a);
    case AlphaMethod::EM:
      return lambda_min_em(a, ledger, e_choice);
    case AlphaMethod::MK:
      return lambda_min_mk(a, ledger);
  }
  throw std::logic_error("unknown alpha method");
}

// Uniform diagonal shift that makes the underestimator convex over the box.
inline double alpha_from_lambda(double lambda_min_bound) { return std::max(0.0, -0.5 * lambda_min_bound); }

}  // namespace inthop
