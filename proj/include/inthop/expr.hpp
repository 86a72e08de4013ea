#pragma once

// Immutable expression trees over variables x1..xn with symbolic
// differentiation, point evaluation and natural interval extension.
//
// Nodes are shared and never mutated, so subtrees (and whole Hessian
// entries) may be referenced from several places at once. Construction goes
// through the builder functions below, which apply a fixed set of light
// simplifications: constant folding, 0/1 identities, sign and constant
// hoisting through products, and a*a -> a^2 for structurally equal factors.

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "inthop/interval.hpp"

namespace inthop {

enum class Op : std::uint8_t {
  Const,
  Var,
  Add,
  Sub,
  Mul,
  Div,
  PowInt,
  Pow,
  Neg,
  Exp,
  Log,
  Sin,
  Cos,
  Sqrt,
};

class Expr;

struct Node {
  Op op = Op::Const;
  double value = 0.0;  // Const
  int index = 0;       // Var, zero-based
  int exponent = 0;    // PowInt
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
  std::size_t hash = 0;
  std::size_t size = 1;  // node count of the subtree
};

using NodePtr = std::shared_ptr<const Node>;

namespace detail {

inline std::size_t hash_mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

inline NodePtr make_node(Op op, double value, int index, int exponent, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = value;
  n->index = index;
  n->exponent = exponent;
  std::size_t h = static_cast<std::size_t>(op);
  h = hash_mix(h, std::bit_cast<std::uint64_t>(value));
  h = hash_mix(h, static_cast<std::size_t>(index));
  h = hash_mix(h, static_cast<std::size_t>(exponent));
  if (lhs) {
    h = hash_mix(h, lhs->hash);
    n->size += lhs->size;
  }
  if (rhs) {
    h = hash_mix(h, rhs->hash);
    n->size += rhs->size;
  }
  n->hash = h;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

inline bool same_tree(const Node* a, const Node* b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->op != b->op || a->size != b->size) return false;
  switch (a->op) {
    case Op::Const:
      return std::bit_cast<std::uint64_t>(a->value) == std::bit_cast<std::uint64_t>(b->value);
    case Op::Var:
      return a->index == b->index;
    case Op::PowInt:
      if (a->exponent != b->exponent) return false;
      break;
    default:
      break;
  }
  return same_tree(a->lhs.get(), b->lhs.get()) && same_tree(a->rhs.get(), b->rhs.get());
}

}  // namespace detail

// Value-semantic handle on an immutable expression tree.
class Expr {
 public:
  Expr() : node_(detail::make_node(Op::Const, 0.0, 0, 0, nullptr, nullptr)) {}
  explicit Expr(NodePtr node) : node_(std::move(node)) {}

  const Node& node() const { return *node_; }
  const NodePtr& ptr() const { return node_; }
  Op op() const { return node_->op; }
  Expr lhs() const { return Expr(node_->lhs); }
  Expr rhs() const { return Expr(node_->rhs); }

  bool is_const() const { return node_->op == Op::Const; }
  bool is_const(double v) const { return is_const() && node_->value == v; }
  double const_value() const { return node_->value; }
  std::size_t size() const { return node_->size; }

  // Structural equality.
  friend bool same(const Expr& a, const Expr& b) {
    return detail::same_tree(a.node_.get(), b.node_.get());
  }
  // Identity of the underlying node object.
  friend bool identical(const Expr& a, const Expr& b) { return a.node_ == b.node_; }

 private:
  NodePtr node_;
};

inline Expr constant(double v) { return Expr(detail::make_node(Op::Const, v, 0, 0, nullptr, nullptr)); }

// Zero-based variable index; x1 in text is variable(0).
inline Expr variable(int index) {
  if (index < 0) throw std::invalid_argument("negative variable index");
  return Expr(detail::make_node(Op::Var, 0.0, index, 0, nullptr, nullptr));
}

namespace detail {

inline Expr raw(Op op, const Expr& a) { return Expr(make_node(op, 0.0, 0, 0, a.ptr(), nullptr)); }
inline Expr raw(Op op, const Expr& a, const Expr& b) {
  return Expr(make_node(op, 0.0, 0, 0, a.ptr(), b.ptr()));
}

}  // namespace detail

Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr powi(const Expr& a, int k);

inline Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return constant(a.const_value() + b.const_value());
  if (a.is_const(0.0)) return b;
  if (b.is_const(0.0)) return a;
  if (b.op() == Op::Neg) return detail::raw(Op::Sub, a, b.lhs());
  return detail::raw(Op::Add, a, b);
}

inline Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return constant(a.const_value() - b.const_value());
  if (b.is_const(0.0)) return a;
  if (a.is_const(0.0)) return -b;
  if (b.op() == Op::Neg) return detail::raw(Op::Add, a, b.lhs());
  return detail::raw(Op::Sub, a, b);
}

inline Expr operator-(const Expr& a) {
  if (a.is_const()) return constant(-a.const_value());
  if (a.op() == Op::Neg) return a.lhs();
  if (a.op() == Op::Mul && a.lhs().is_const()) return constant(-a.lhs().const_value()) * a.rhs();
  return detail::raw(Op::Neg, a);
}

inline Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return constant(a.const_value() * b.const_value());
  if (a.is_const(0.0) || b.is_const(0.0)) return constant(0.0);
  if (a.is_const(1.0)) return b;
  if (b.is_const(1.0)) return a;
  if (b.is_const()) return b * a;
  if (a.is_const(-1.0)) return -b;
  if (a.op() == Op::Neg) return -(a.lhs() * b);
  if (b.op() == Op::Neg) return -(a * b.lhs());
  if (a.is_const() && b.op() == Op::Mul && b.lhs().is_const())
    return constant(a.const_value() * b.lhs().const_value()) * b.rhs();
  if (!a.is_const() && a.op() == Op::Mul && a.lhs().is_const()) return a.lhs() * (a.rhs() * b);
  if (!a.is_const() && b.op() == Op::Mul && b.lhs().is_const()) return b.lhs() * (a * b.rhs());
  if (same(a, b)) return powi(a, 2);
  return detail::raw(Op::Mul, a, b);
}

inline Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const() && b.const_value() != 0.0)
    return constant(a.const_value() / b.const_value());
  if (b.is_const(1.0)) return a;
  if (a.is_const(0.0)) return constant(0.0);
  return detail::raw(Op::Div, a, b);
}

inline Expr powi(const Expr& a, int k) {
  if (k == 0) return constant(1.0);
  if (k == 1) return a;
  if (a.is_const()) return constant(std::pow(a.const_value(), k));
  if (a.op() == Op::Neg && k % 2 == 0) return powi(a.lhs(), k);
  return Expr(detail::make_node(Op::PowInt, 0.0, 0, k, a.ptr(), nullptr));
}

inline Expr pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_const()) {
    const double e = exponent.const_value();
    if (std::nearbyint(e) == e && std::abs(e) < 1e6) return powi(base, static_cast<int>(e));
  }
  if (base.is_const() && exponent.is_const())
    return constant(std::pow(base.const_value(), exponent.const_value()));
  return detail::raw(Op::Pow, base, exponent);
}

#define INTHOP_UNARY_BUILDER(name, opcode)                          \
  inline Expr name(const Expr& a) {                                 \
    if (a.is_const()) return constant(std::name(a.const_value()));  \
    return detail::raw(Op::opcode, a);                              \
  }
INTHOP_UNARY_BUILDER(exp, Exp)
INTHOP_UNARY_BUILDER(log, Log)
INTHOP_UNARY_BUILDER(sin, Sin)
INTHOP_UNARY_BUILDER(cos, Cos)
INTHOP_UNARY_BUILDER(sqrt, Sqrt)
#undef INTHOP_UNARY_BUILDER

// Largest variable index used plus one (0 for constant expressions).
inline int arity(const Expr& e) {
  const Node& n = e.node();
  if (n.op == Op::Var) return n.index + 1;
  int m = 0;
  if (n.lhs) m = std::max(m, arity(Expr(n.lhs)));
  if (n.rhs) m = std::max(m, arity(Expr(n.rhs)));
  return m;
}

// ---------------------------------------------------------------- evaluation

namespace detail {

template <class T, class Leaf>
T evaluate(const Node& n, const Leaf& leaf) {
  switch (n.op) {
    case Op::Const:
      return T(n.value);
    case Op::Var:
      return leaf(n.index);
    case Op::Add:
      return evaluate<T>(*n.lhs, leaf) + evaluate<T>(*n.rhs, leaf);
    case Op::Sub:
      return evaluate<T>(*n.lhs, leaf) - evaluate<T>(*n.rhs, leaf);
    case Op::Mul:
      return evaluate<T>(*n.lhs, leaf) * evaluate<T>(*n.rhs, leaf);
    case Op::Div:
      return evaluate<T>(*n.lhs, leaf) / evaluate<T>(*n.rhs, leaf);
    case Op::Neg:
      return -evaluate<T>(*n.lhs, leaf);
    case Op::PowInt:
      if constexpr (std::is_same_v<T, double>)
        return std::pow(evaluate<T>(*n.lhs, leaf), n.exponent);
      else
        return powi(evaluate<T>(*n.lhs, leaf), n.exponent);
    case Op::Pow: {
      using std::pow;
      return pow(evaluate<T>(*n.lhs, leaf), evaluate<T>(*n.rhs, leaf));
    }
    case Op::Exp: {
      using std::exp;
      return exp(evaluate<T>(*n.lhs, leaf));
    }
    case Op::Log: {
      using std::log;
      return log(evaluate<T>(*n.lhs, leaf));
    }
    case Op::Sin: {
      using std::sin;
      return sin(evaluate<T>(*n.lhs, leaf));
    }
    case Op::Cos: {
      using std::cos;
      return cos(evaluate<T>(*n.lhs, leaf));
    }
    case Op::Sqrt: {
      using std::sqrt;
      return sqrt(evaluate<T>(*n.lhs, leaf));
    }
  }
  throw std::logic_error("unknown expression node");
}

}  // namespace detail

// IEEE evaluation; non-finite results are returned as-is.
inline double eval_scalar(const Expr& e, std::span<const double> x) {
  return detail::evaluate<double>(e.node(), [&](int i) { return x[static_cast<std::size_t>(i)]; });
}

// Natural interval extension of e over box.
inline Interval eval_interval(const Expr& e, const IntervalVector& box) {
  return detail::evaluate<Interval>(e.node(),
                                    [&](int i) { return box[static_cast<std::size_t>(i)]; });
}

// ----------------------------------------------------------- differentiation

namespace detail {

class Differentiator {
 public:
  explicit Differentiator(int var) : var_(var) {}

  Expr operator()(const Expr& e) {
    if (auto it = memo_.find(e.ptr().get()); it != memo_.end()) return it->second;
    Expr d = derive(e);
    memo_.emplace(e.ptr().get(), d);
    keep_.push_back(e.ptr());
    return d;
  }

 private:
  Expr derive(const Expr& e) {
    const Node& n = e.node();
    switch (n.op) {
      case Op::Const:
        return constant(0.0);
      case Op::Var:
        return constant(n.index == var_ ? 1.0 : 0.0);
      case Op::Add:
        return (*this)(e.lhs()) + (*this)(e.rhs());
      case Op::Sub:
        return (*this)(e.lhs()) - (*this)(e.rhs());
      case Op::Mul:
        return (*this)(e.lhs()) * e.rhs() + e.lhs() * (*this)(e.rhs());
      case Op::Div: {
        const Expr a = e.lhs();
        const Expr b = e.rhs();
        const Expr da = (*this)(a);
        const Expr db = (*this)(b);
        if (db.is_const(0.0)) return da / b;
        return (da * b - a * db) / powi(b, 2);
      }
      case Op::Neg:
        return -(*this)(e.lhs());
      case Op::PowInt: {
        const Expr a = e.lhs();
        return constant(n.exponent) * powi(a, n.exponent - 1) * (*this)(a);
      }
      case Op::Pow: {
        const Expr a = e.lhs();
        const Expr b = e.rhs();
        return e * ((*this)(b) * log(a) + b * (*this)(a) / a);
      }
      case Op::Exp:
        return e * (*this)(e.lhs());
      case Op::Log:
        return (*this)(e.lhs()) / e.lhs();
      case Op::Sin:
        return cos(e.lhs()) * (*this)(e.lhs());
      case Op::Cos:
        return -(sin(e.lhs()) * (*this)(e.lhs()));
      case Op::Sqrt:
        return (*this)(e.lhs()) / (constant(2.0) * e);
    }
    throw std::logic_error("unknown expression node");
  }

  int var_;
  std::unordered_map<const Node*, Expr> memo_;
  std::vector<NodePtr> keep_;  // pins memo keys
};

}  // namespace detail

// d e / d x_{var+1}
inline Expr derivative(const Expr& e, int var) { return detail::Differentiator(var)(e); }

// Symmetric n x n grid of expressions. Only the upper triangle is stored, so
// (i, j) and (j, i) resolve to the same expression object.
class HessianExprs {
 public:
  HessianExprs() = default;
  explicit HessianExprs(std::size_t n) : n_(n), upper_(n * (n + 1) / 2) {}

  std::size_t size() const { return n_; }
  const Expr& operator()(std::size_t i, std::size_t j) const { return upper_[slot(i, j)]; }
  void set(std::size_t i, std::size_t j, Expr e) { upper_[slot(i, j)] = std::move(e); }

 private:
  std::size_t slot(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return i * n_ - i * (i + 1) / 2 + j;
  }

  std::size_t n_ = 0;
  std::vector<Expr> upper_;
};

struct Derivatives {
  std::vector<Expr> gradient;
  HessianExprs hessian;
};

inline Derivatives differentiate(const Expr& e, int n) {
  Derivatives d;
  d.gradient.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) d.gradient.push_back(derivative(e, i));
  d.hessian = HessianExprs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    detail::Differentiator di(i);
    for (int j = i; j < n; ++j) {
      // d/dx_i of (d e/d x_j); the memo is shared across the row.
      d.hessian.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                    di(d.gradient[static_cast<std::size_t>(j)]));
    }
  }
  return d;
}

// ----------------------------------------------------------------- printing

namespace detail {

inline int precedence(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Neg:
      return 3;
    case Op::PowInt:
    case Op::Pow:
      return 4;
    default:
      return 5;
  }
}

inline void print(std::ostream& os, const Node& n, int parent_prec, bool right_operand) {
  const int prec = precedence(n.op);
  const bool paren = prec < parent_prec || (right_operand && prec == parent_prec && prec < 4) ||
                     (n.op == Op::Const && n.value < 0.0 && parent_prec > 1);
  if (paren) os << '(';
  auto fn = [&](const char* name) {
    os << name << '(';
    print(os, *n.lhs, 0, false);
    os << ')';
  };
  switch (n.op) {
    case Op::Const: {
      char buf[32];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, n.value);
      os << std::string_view(buf, static_cast<std::size_t>(end - buf));
      break;
    }
    case Op::Var:
      os << 'x' << n.index + 1;
      break;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const char sym = n.op == Op::Add ? '+' : n.op == Op::Sub ? '-' : n.op == Op::Mul ? '*' : '/';
      print(os, *n.lhs, prec, false);
      os << ' ' << sym << ' ';
      print(os, *n.rhs, prec, true);
      break;
    }
    case Op::Neg:
      os << '-';
      print(os, *n.lhs, prec + 1, false);
      break;
    case Op::PowInt:
      print(os, *n.lhs, prec + 1, false);
      os << '^' << n.exponent;
      break;
    case Op::Pow:
      print(os, *n.lhs, prec + 1, false);
      os << '^';
      print(os, *n.rhs, prec, true);
      break;
    case Op::Exp:
      fn("exp");
      break;
    case Op::Log:
      fn("log");
      break;
    case Op::Sin:
      fn("sin");
      break;
    case Op::Cos:
      fn("cos");
      break;
    case Op::Sqrt:
      fn("sqrt");
      break;
  }
  if (paren) os << ')';
}

}  // namespace detail

inline std::string to_string(const Expr& e) {
  std::ostringstream os;
  detail::print(os, e.node(), 0, false);
  return os.str();
}

// ------------------------------------------------------------------ parsing

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class UnknownVariable : public ParseError {
 public:
  UnknownVariable(const std::string& name, std::size_t position)
      : ParseError("unknown variable '" + name + "'", position) {}
};

namespace detail {

// Recursive descent over
//   sum     := product (('+'|'-') product)*
//   product := unary (('*'|'/') unary)*
//   unary   := ('-'|'+') unary | power
//   power   := primary ('^' unary)?          (right-associative)
//   primary := number | xK | fn '(' sum ')' | '(' sum ')'
class Parser {
 public:
  Parser(std::string_view text, int n) : text_(text), n_(n) {}

  Expr parse() {
    Expr e = sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr sum() {
    Expr e = product();
    for (;;) {
      if (accept('+'))
        e = e + product();
      else if (accept('-'))
        e = e - product();
      else
        return e;
    }
  }

  Expr product() {
    Expr e = unary();
    for (;;) {
      if (accept('*'))
        e = e * unary();
      else if (accept('/'))
        e = e / unary();
      else
        return e;
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) return pow(base, unary());
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    double v = 0.0;
    auto [end, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (ec != std::errc()) fail("malformed number");
    pos_ = static_cast<std::size_t>(end - text_.data());
    if (pos_ == start) fail("malformed number");
    return constant(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    if (name.size() > 1 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      const long idx = std::stol(name.substr(1));
      if (idx < 1 || idx > n_) throw UnknownVariable(name, start);
      return variable(static_cast<int>(idx - 1));
    }
    using Builder = Expr (*)(const Expr&);
    Builder fn = nullptr;
    if (name == "exp") fn = &exp;
    else if (name == "log") fn = &log;
    else if (name == "sin") fn = &sin;
    else if (name == "cos") fn = &cos;
    else if (name == "sqrt") fn = &sqrt;
    if (!fn) {
      pos_ = start;
      throw UnknownVariable(name, start);
    }
    if (!accept('(')) fail("expected '(' after " + name);
    Expr arg = sum();
    if (!accept(')')) fail("expected ')'");
    return fn(arg);
  }

  std::string_view text_;
  int n_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse_expr(std::string_view text, int n) { return detail::Parser(text, n).parse(); }

}  // namespace inthop
