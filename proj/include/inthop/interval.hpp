#pragma once

// Conservative interval arithmetic over the reals.
//
// Endpoints are computed in round-to-nearest and then widened outward by
// |x| * 2^-52 plus one denormal step, so every result encloses the exact
// real range of the operation. Degenerate (point) intervals built from
// constants are kept exact; widening only happens after an operation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace inthop {

class DivisionByIntervalContainingZero : public std::domain_error {
 public:
  DivisionByIntervalContainingZero()
      : std::domain_error("interval division by an interval containing zero") {}
};

class DomainViolation : public std::domain_error {
 public:
  explicit DomainViolation(const std::string& what) : std::domain_error(what) {}
};

namespace detail {

inline double widen_down(double x) {
  if (!std::isfinite(x)) return x;
  return x - (std::abs(x) * 0x1p-52 + std::numeric_limits<double>::denorm_min());
}

inline double widen_up(double x) {
  if (!std::isfinite(x)) return x;
  return x + (std::abs(x) * 0x1p-52 + std::numeric_limits<double>::denorm_min());
}

}  // namespace detail

class Interval {
 public:
  constexpr Interval() = default;
  constexpr explicit Interval(double point) : lo_(point), hi_(point) {}
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (std::isnan(lo) || std::isnan(hi) || lo > hi)
      throw std::invalid_argument("interval requires lo <= hi");
  }

  // Builds [lo, hi] widened outward by one relative epsilon on each side.
  static Interval outward(double lo, double hi) {
    return Interval(detail::widen_down(lo), detail::widen_up(hi));
  }

  constexpr double lo() const { return lo_; }
  constexpr double hi() const { return hi_; }
  constexpr double width() const { return hi_ - lo_; }
  constexpr double mid() const { return 0.5 * (lo_ + hi_); }
  constexpr double rad() const { return 0.5 * (hi_ - lo_); }
  constexpr double mag() const { return std::max(std::abs(lo_), std::abs(hi_)); }

  constexpr bool contains(double x) const { return lo_ <= x && x <= hi_; }
  constexpr bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
  constexpr bool is_point() const { return lo_ == hi_; }
  constexpr bool subset_of(const Interval& other) const {
    return other.lo_ <= lo_ && hi_ <= other.hi_;
  }

  friend constexpr bool operator==(const Interval&, const Interval&) = default;

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

inline std::ostream& operator<<(std::ostream& os, const Interval& a) {
  return os << '[' << a.lo() << ", " << a.hi() << ']';
}

inline Interval operator-(const Interval& a) { return Interval(-a.hi(), -a.lo()); }

inline Interval operator+(const Interval& a, const Interval& b) {
  return Interval::outward(a.lo() + b.lo(), a.hi() + b.hi());
}

inline Interval operator-(const Interval& a, const Interval& b) {
  return Interval::outward(a.lo() - b.hi(), a.hi() - b.lo());
}

inline Interval operator*(const Interval& a, const Interval& b) {
  const double p[4] = {a.lo() * b.lo(), a.lo() * b.hi(), a.hi() * b.lo(), a.hi() * b.hi()};
  // 0 * inf yields NaN; such products contribute 0 to the range.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : p) {
    if (std::isnan(v)) v = 0.0;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return Interval::outward(lo, hi);
}

inline Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw DivisionByIntervalContainingZero();
  const double q[4] = {a.lo() / b.lo(), a.lo() / b.hi(), a.hi() / b.lo(), a.hi() / b.hi()};
  return Interval::outward(*std::min_element(q, q + 4), *std::max_element(q, q + 4));
}

inline Interval exp(const Interval& a) {
  return Interval(std::max(0.0, detail::widen_down(std::exp(a.lo()))),
                  detail::widen_up(std::exp(a.hi())));
}

inline Interval log(const Interval& a) {
  if (!(a.lo() > 0.0)) throw DomainViolation("log of an interval reaching nonpositive values");
  return Interval::outward(std::log(a.lo()), std::log(a.hi()));
}

inline Interval sqrt(const Interval& a) {
  if (!(a.lo() >= 0.0)) throw DomainViolation("sqrt of an interval reaching negative values");
  return Interval(std::max(0.0, detail::widen_down(std::sqrt(a.lo()))),
                  detail::widen_up(std::sqrt(a.hi())));
}

namespace detail {

// True when some phase + 2*pi*k (k integer) lies in [lo, hi]. A small
// tolerance makes the test include near misses, which only loosens.
inline bool hits_phase(double lo, double hi, double phase) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double k = std::ceil((lo - phase) / two_pi - 1e-9);
  return phase + two_pi * k <= hi + 1e-9 * (1.0 + std::abs(hi));
}

inline Interval periodic_range(const Interval& a, double (*fn)(double), double max_phase,
                               double min_phase) {
  if (!std::isfinite(a.lo()) || !std::isfinite(a.hi()) || a.width() >= 2.0 * std::numbers::pi)
    return Interval(-1.0, 1.0);
  const double f_lo = fn(a.lo());
  const double f_hi = fn(a.hi());
  double lo = std::min(f_lo, f_hi);
  double hi = std::max(f_lo, f_hi);
  lo = hits_phase(a.lo(), a.hi(), min_phase) ? -1.0 : std::max(-1.0, widen_down(lo));
  hi = hits_phase(a.lo(), a.hi(), max_phase) ? 1.0 : std::min(1.0, widen_up(hi));
  return Interval(lo, hi);
}

}  // namespace detail

inline Interval sin(const Interval& a) {
  return detail::periodic_range(a, static_cast<double (*)(double)>(std::sin),
                                0.5 * std::numbers::pi, -0.5 * std::numbers::pi);
}

inline Interval cos(const Interval& a) {
  return detail::periodic_range(a, static_cast<double (*)(double)>(std::cos), 0.0,
                                std::numbers::pi);
}

// Integer power. Even exponents use the range rule [0, max(lo^k, hi^k)]
// when the base straddles zero; negative exponents go through division.
inline Interval powi(const Interval& a, int k) {
  if (k == 0) return Interval(1.0);
  if (k == 1) return a;
  if (k < 0) return Interval(1.0) / powi(a, -k);
  const double p_lo = std::pow(a.lo(), k);
  const double p_hi = std::pow(a.hi(), k);
  if (k % 2 == 1) return Interval::outward(p_lo, p_hi);
  if (a.lo() >= 0.0) return Interval::outward(p_lo, p_hi);
  if (a.hi() <= 0.0) return Interval::outward(p_hi, p_lo);
  return Interval(0.0, detail::widen_up(std::max(p_lo, p_hi)));
}

// Real power base^exponent for a positive base, via exp(exponent * log(base)).
inline Interval pow(const Interval& base, const Interval& exponent) {
  if (!(base.lo() > 0.0))
    throw DomainViolation("real power of an interval reaching nonpositive values");
  return exp(exponent * log(base));
}

using IntervalVector = std::vector<Interval>;

// max_i (hi_i - lo_i); zero for an empty vector.
inline double hull_width(const IntervalVector& v) {
  double w = 0.0;
  for (const auto& e : v) w = std::max(w, e.width());
  return w;
}

template <class Point>
bool box_contains(const IntervalVector& box, const Point& x) {
  for (std::size_t i = 0; i < box.size(); ++i)
    if (!box[i].contains(x[i])) return false;
  return true;
}

// Dense n x n grid of intervals, row-major.
class IntervalMatrix {
 public:
  IntervalMatrix() = default;
  explicit IntervalMatrix(std::size_t n) : n_(n), data_(n * n, Interval(0.0)) {}

  // Builds from row-major (lo, hi) pairs.
  static IntervalMatrix from_bounds(std::size_t n, const std::vector<std::pair<double, double>>& b) {
    if (b.size() != n * n) throw std::invalid_argument("interval matrix bounds size mismatch");
    IntervalMatrix m(n);
    for (std::size_t k = 0; k < b.size(); ++k) m.data_[k] = Interval(b[k].first, b[k].second);
    return m;
  }

  std::size_t size() const { return n_; }
  Interval& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const Interval& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  bool is_symmetric() const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if (!((*this)(i, j) == (*this)(j, i))) return false;
    return true;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Interval> data_;
};

}  // namespace inthop
