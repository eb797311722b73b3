// Copyright 2026 The Carnot Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/**
 * @file
 * @brief Coefficient expressions: parsing, printing, evaluation and symbolic differentiation.
 *
 * Grammar (whitespace insignificant, variables x1..xn):
 *
 *     expr   := term (('+'|'-') term)*
 *     term   := factor (('*'|'/') factor)*
 *     factor := base ('^' integer)?
 *     base   := number | 'x' integer | func '(' expr ')' | '(' expr ')' | '-' base
 *     func   := sin | cos | exp | log | sqrt | abs
 *
 * Unary minus binds tighter than '^', so "-x1^2" is (-x1)^2.
 */

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "carnot/errors.hpp"

namespace carnot {

enum class Op : std::uint8_t {
  constant,
  variable,
  neg,
  sin,
  cos,
  exp,
  log,
  sqrt,
  abs,
  add,
  sub,
  mul,
  div,
  pow,
};

inline bool is_function(Op op) { return op >= Op::sin && op <= Op::abs; }

inline const char * function_name(Op op)
{
  switch (op) {
  case Op::sin: return "sin";
  case Op::cos: return "cos";
  case Op::exp: return "exp";
  case Op::log: return "log";
  case Op::sqrt: return "sqrt";
  case Op::abs: return "abs";
  default: return "?";
  }
}

class Expr;

struct ExprNode
{
  Op op{Op::constant};
  double value{0.0};
  /// Zero-based variable index for Op::variable, exponent for Op::pow.
  int index{0};
  std::vector<Expr> args;
};

/**
 * @brief Immutable, shareable expression tree.
 *
 * add and mul nodes are n-ary after simplification; the parser produces binary nodes.
 */
class Expr
{
public:
  Expr() : node_(std::make_shared<const ExprNode>()) {}

  static Expr constant(double v)
  {
    ExprNode n;
    n.op = Op::constant;
    n.value = v;
    return Expr(std::move(n));
  }

  /// @param index zero-based coordinate index
  static Expr variable(int index)
  {
    ExprNode n;
    n.op = Op::variable;
    n.index = index;
    return Expr(std::move(n));
  }

  static Expr unary(Op op, Expr a)
  {
    ExprNode n;
    n.op = op;
    n.args.push_back(std::move(a));
    return Expr(std::move(n));
  }

  static Expr binary(Op op, Expr a, Expr b)
  {
    ExprNode n;
    n.op = op;
    n.args.push_back(std::move(a));
    n.args.push_back(std::move(b));
    return Expr(std::move(n));
  }

  static Expr nary(Op op, std::vector<Expr> args)
  {
    ExprNode n;
    n.op = op;
    n.args = std::move(args);
    return Expr(std::move(n));
  }

  static Expr power(Expr a, int exponent)
  {
    ExprNode n;
    n.op = Op::pow;
    n.index = exponent;
    n.args.push_back(std::move(a));
    return Expr(std::move(n));
  }

  Op op() const { return node_->op; }
  double value() const { return node_->value; }
  int index() const { return node_->index; }
  int exponent() const { return node_->index; }
  const std::vector<Expr> & args() const { return node_->args; }
  const Expr & arg(std::size_t i) const { return node_->args[i]; }

  bool is_constant() const { return op() == Op::constant; }
  bool is_constant(double v) const { return op() == Op::constant && value() == v; }
  bool is_zero() const { return is_constant(0.0); }

  /// Largest zero-based variable index referenced, or -1.
  int max_variable() const
  {
    int m = op() == Op::variable ? index() : -1;
    for (const auto & a : args()) m = std::max(m, a.max_variable());
    return m;
  }

  friend bool structurally_equal(const Expr & a, const Expr & b)
  {
    if (a.node_ == b.node_) return true;
    if (a.op() != b.op() || a.args().size() != b.args().size()) return false;
    switch (a.op()) {
    case Op::constant:
      if (a.value() != b.value()) return false;
      break;
    case Op::variable:
    case Op::pow:
      if (a.index() != b.index()) return false;
      break;
    default: break;
    }
    for (std::size_t i = 0; i < a.args().size(); ++i) {
      if (!structurally_equal(a.arg(i), b.arg(i))) return false;
    }
    return true;
  }

private:
  explicit Expr(ExprNode && n) : node_(std::make_shared<const ExprNode>(std::move(n))) {}

  std::shared_ptr<const ExprNode> node_;
};

// ---------------------------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------------------------

namespace detail {

inline double apply_function(Op op, double a)
{
  switch (op) {
  case Op::neg: return -a;
  case Op::sin: return std::sin(a);
  case Op::cos: return std::cos(a);
  case Op::exp: return std::exp(a);
  case Op::log: return std::log(a);
  case Op::sqrt: return std::sqrt(a);
  case Op::abs: return std::abs(a);
  default: return a;
  }
}

inline double int_pow(double a, int k)
{
  if (k < 0) return 1.0 / int_pow(a, -k);
  double r = 1.0;
  while (k) {
    if (k & 1) r *= a;
    a *= a;
    k >>= 1;
  }
  return r;
}

}  // namespace detail

/// Tree-walking evaluation. Throws DomainError on a non-finite result.
inline double evaluate(const Expr & e, std::span<const double> x)
{
  double r = 0.0;
  switch (e.op()) {
  case Op::constant: r = e.value(); break;
  case Op::variable:
    if (static_cast<std::size_t>(e.index()) >= x.size()) {
      throw DimensionError("variable x" + std::to_string(e.index() + 1) + " outside point dimension");
    }
    r = x[static_cast<std::size_t>(e.index())];
    break;
  case Op::add:
    for (const auto & a : e.args()) r += evaluate(a, x);
    break;
  case Op::mul:
    r = 1.0;
    for (const auto & a : e.args()) r *= evaluate(a, x);
    break;
  case Op::sub: r = evaluate(e.arg(0), x) - evaluate(e.arg(1), x); break;
  case Op::div: r = evaluate(e.arg(0), x) / evaluate(e.arg(1), x); break;
  case Op::pow: r = detail::int_pow(evaluate(e.arg(0), x), e.exponent()); break;
  default: r = detail::apply_function(e.op(), evaluate(e.arg(0), x)); break;
  }
  if (!std::isfinite(r)) throw DomainError("non-finite expression value");
  return r;
}

/**
 * @brief Postfix program compiled from an Expr; evaluates without recursion or allocation.
 */
class Program
{
public:
  Program() = default;

  explicit Program(const Expr & e)
  {
    int depth = 0;
    emit(e, depth);
    if (max_depth_ > kStack) throw InputError("expression nesting too deep");
  }

  double operator()(const double * x) const
  {
    std::array<double, kStack> st;
    st[0] = 0.0;
    int sp = 0;
    for (const auto & in : code_) {
      switch (in.op) {
      case Op::constant: st[sp++] = in.value; break;
      case Op::variable: st[sp++] = x[in.arg]; break;
      case Op::add: {
        double acc = st[sp - in.arg];
        for (int i = 1; i < in.arg; ++i) acc += st[sp - in.arg + i];
        sp -= in.arg - 1;
        st[sp - 1] = acc;
        break;
      }
      case Op::mul: {
        double acc = st[sp - in.arg];
        for (int i = 1; i < in.arg; ++i) acc *= st[sp - in.arg + i];
        sp -= in.arg - 1;
        st[sp - 1] = acc;
        break;
      }
      case Op::sub:
        --sp;
        st[sp - 1] -= st[sp];
        break;
      case Op::div:
        --sp;
        st[sp - 1] /= st[sp];
        break;
      case Op::pow: st[sp - 1] = detail::int_pow(st[sp - 1], in.arg); break;
      default: st[sp - 1] = detail::apply_function(in.op, st[sp - 1]); break;
      }
    }
    return st[0];
  }

  double operator()(std::span<const double> x) const { return (*this)(x.data()); }

private:
  static constexpr int kStack = 64;

  struct Instr
  {
    Op op;
    int arg;
    double value;
  };

  void emit(const Expr & e, int & depth)
  {
    switch (e.op()) {
    case Op::constant:
      code_.push_back({Op::constant, 0, e.value()});
      max_depth_ = std::max(max_depth_, ++depth);
      return;
    case Op::variable:
      code_.push_back({Op::variable, e.index(), 0.0});
      max_depth_ = std::max(max_depth_, ++depth);
      return;
    case Op::add:
    case Op::mul: {
      for (const auto & a : e.args()) emit(a, depth);
      const int k = static_cast<int>(e.args().size());
      if (k == 0) {
        code_.push_back({Op::constant, 0, e.op() == Op::add ? 0.0 : 1.0});
        max_depth_ = std::max(max_depth_, ++depth);
      } else {
        code_.push_back({e.op(), k, 0.0});
        depth -= k - 1;
      }
      return;
    }
    case Op::sub:
    case Op::div:
      emit(e.arg(0), depth);
      emit(e.arg(1), depth);
      code_.push_back({e.op(), 2, 0.0});
      --depth;
      return;
    case Op::pow:
      emit(e.arg(0), depth);
      code_.push_back({Op::pow, e.exponent(), 0.0});
      return;
    default:
      emit(e.arg(0), depth);
      code_.push_back({e.op(), 1, 0.0});
      return;
    }
  }

  std::vector<Instr> code_;
  int max_depth_{0};
};

// ---------------------------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------------------------

namespace detail {

inline std::string format_number(double v)
{
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Binding strength: 1 sum, 2 product, 3 power, 4 unary/base.
inline int precedence(const Expr & e)
{
  switch (e.op()) {
  case Op::add:
  case Op::sub: return 1;
  case Op::mul:
  case Op::div: return 2;
  case Op::pow: return 3;
  case Op::constant: return e.value() < 0 || std::signbit(e.value()) ? 4 : 5;
  case Op::neg: return 4;
  default: return 5;
  }
}

inline void print_to(const Expr & e, std::string & out);

inline void print_wrapped(const Expr & e, bool paren, std::string & out)
{
  if (paren) out += '(';
  print_to(e, out);
  if (paren) out += ')';
}

inline void print_to(const Expr & e, std::string & out)
{
  switch (e.op()) {
  case Op::constant:
    if (std::signbit(e.value())) {
      out += '-';
      out += format_number(-e.value());
    } else {
      out += format_number(e.value());
    }
    return;
  case Op::variable:
    out += 'x';
    out += std::to_string(e.index() + 1);
    return;
  case Op::neg:
    out += '-';
    print_wrapped(e.arg(0), precedence(e.arg(0)) < 4, out);
    return;
  case Op::add:
  case Op::mul: {
    const bool sum = e.op() == Op::add;
    if (e.args().empty()) {
      out += sum ? "0" : "1";
      return;
    }
    const int level = sum ? 1 : 2;
    for (std::size_t i = 0; i < e.args().size(); ++i) {
      const Expr & a = e.arg(i);
      if (i > 0) out += sum ? " + " : "*";
      const int pa = precedence(a);
      print_wrapped(a, i == 0 ? pa < level : pa <= level, out);
    }
    return;
  }
  case Op::sub:
  case Op::div: {
    const bool sum = e.op() == Op::sub;
    const int level = sum ? 1 : 2;
    print_wrapped(e.arg(0), precedence(e.arg(0)) < level, out);
    out += sum ? " - " : "/";
    print_wrapped(e.arg(1), precedence(e.arg(1)) <= level, out);
    return;
  }
  case Op::pow:
    print_wrapped(e.arg(0), precedence(e.arg(0)) < 4, out);
    out += '^';
    out += std::to_string(e.exponent());
    return;
  default:
    out += function_name(e.op());
    out += '(';
    print_to(e.arg(0), out);
    out += ')';
    return;
  }
}

}  // namespace detail

/// Prints in the input grammar; parse(to_string(e)) reproduces the same string.
inline std::string to_string(const Expr & e)
{
  std::string out;
  detail::print_to(e, out);
  return out;
}

// ---------------------------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------------------------

namespace detail {

class Parser
{
public:
  Parser(std::string_view text, int dimension) : text_(text), dim_(dimension) {}

  Expr parse()
  {
    Expr e = expr();
    skip();
    if (pos_ != text_.size()) throw ParseError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
    return e;
  }

private:
  void skip()
  {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c)
  {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr()
  {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(Op::add, lhs, term());
      } else if (accept('-')) {
        lhs = Expr::binary(Op::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term()
  {
    Expr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(Op::mul, lhs, factor());
      } else if (accept('/')) {
        lhs = Expr::binary(Op::div, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  Expr factor()
  {
    Expr b = base();
    if (accept('^')) {
      skip();
      const std::size_t start = pos_;
      bool negative = false;
      if (pos_ < text_.size() && text_[pos_] == '-') {
        negative = true;
        ++pos_;
      }
      const long k = integer(start);
      return Expr::power(b, static_cast<int>(negative ? -k : k));
    }
    return b;
  }

  long integer(std::size_t start)
  {
    const std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) throw ParseError("expected integer", start);
    if (pos_ - digits > 6) throw ParseError("integer too large", start);
    return std::strtol(std::string(text_.substr(digits, pos_ - digits)).c_str(), nullptr, 10);
  }

  Expr base()
  {
    skip();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return Expr::unary(Op::neg, base());
    }
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  Expr number()
  {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
        pos_ = q;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string s(text_.substr(start, pos_ - start));
    char * end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s == ".") throw ParseError("malformed number '" + s + "'", start);
    return Expr::constant(v);
  }

  Expr identifier()
  {
    const std::size_t start = pos_;
    if (text_[pos_] == 'x' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      ++pos_;
      const long k = integer(start);
      if (k < 1) throw ParseError("variable index must start at 1", start);
      if (k > dim_) throw ParseError("variable x" + std::to_string(k) + " exceeds dimension " + std::to_string(dim_), start);
      return Expr::variable(static_cast<int>(k - 1));
    }
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    static constexpr std::array<Op, 6> funcs{Op::sin, Op::cos, Op::exp, Op::log, Op::sqrt, Op::abs};
    for (Op f : funcs) {
      if (name == function_name(f)) {
        if (!accept('(')) throw ParseError("expected '(' after " + std::string(name), pos_);
        Expr a = expr();
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        return Expr::unary(f, a);
      }
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_{0};
};

}  // namespace detail

/// Parses @p text over variables x1..x@p dimension. The tree is returned unsimplified.
inline Expr parse_expr(std::string_view text, int dimension)
{
  return detail::Parser(text, dimension).parse();
}

// ---------------------------------------------------------------------------------------------
// Simplification and differentiation
// ---------------------------------------------------------------------------------------------

/**
 * @brief Constant folding, 0/1 identities, sum/product flattening and a - a -> 0.
 *
 * Not a canonical form: equal expressions may simplify differently.
 */
inline Expr simplify(const Expr & e)
{
  switch (e.op()) {
  case Op::constant:
  case Op::variable: return e;
  case Op::neg: {
    Expr a = simplify(e.arg(0));
    if (a.is_constant()) return Expr::constant(-a.value());
    if (a.op() == Op::neg) return a.arg(0);
    return Expr::unary(Op::neg, a);
  }
  case Op::add:
  case Op::mul: {
    const bool sum = e.op() == Op::add;
    const double unit = sum ? 0.0 : 1.0;
    double folded = unit;
    bool negate = false;
    std::vector<Expr> terms;
    std::vector<Expr> pending(e.args().rbegin(), e.args().rend());
    while (!pending.empty()) {
      Expr a = pending.back();
      pending.pop_back();
      a = simplify(a);
      if (a.op() == e.op()) {
        for (auto it = a.args().rbegin(); it != a.args().rend(); ++it) pending.push_back(*it);
        continue;
      }
      if (!sum && a.op() == Op::neg) {
        negate = !negate;
        a = a.arg(0);
        if (a.op() == e.op()) {
          for (auto it = a.args().rbegin(); it != a.args().rend(); ++it) pending.push_back(*it);
          continue;
        }
      }
      if (a.is_constant()) {
        folded = sum ? folded + a.value() : folded * a.value();
      } else {
        terms.push_back(a);
      }
    }
    if (!sum && negate) folded = -folded;
    if (!sum && folded == 0.0) return Expr::constant(0.0);
    if (folded != unit || terms.empty()) {
      if (!sum && folded == -1.0 && !terms.empty()) {
        Expr rest = terms.size() == 1 ? terms[0] : Expr::nary(Op::mul, terms);
        return Expr::unary(Op::neg, rest);
      }
      if (sum) {
        terms.push_back(Expr::constant(folded));
      } else {
        terms.insert(terms.begin(), Expr::constant(folded));
      }
    }
    if (terms.size() == 1) return terms[0];
    return Expr::nary(e.op(), std::move(terms));
  }
  case Op::sub: {
    Expr a = simplify(e.arg(0));
    Expr b = simplify(e.arg(1));
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() - b.value());
    if (b.is_zero()) return a;
    if (a.is_zero()) return simplify(Expr::unary(Op::neg, b));
    if (structurally_equal(a, b)) return Expr::constant(0.0);
    return Expr::binary(Op::sub, a, b);
  }
  case Op::div: {
    Expr a = simplify(e.arg(0));
    Expr b = simplify(e.arg(1));
    if (a.is_zero()) return Expr::constant(0.0);
    if (b.is_constant(1.0)) return a;
    if (a.is_constant() && b.is_constant() && b.value() != 0.0) return Expr::constant(a.value() / b.value());
    return Expr::binary(Op::div, a, b);
  }
  case Op::pow: {
    Expr a = simplify(e.arg(0));
    if (e.exponent() == 0) return Expr::constant(1.0);
    if (e.exponent() == 1) return a;
    if (a.is_constant() && (a.value() != 0.0 || e.exponent() > 0)) {
      return Expr::constant(detail::int_pow(a.value(), e.exponent()));
    }
    return Expr::power(a, e.exponent());
  }
  default: {
    Expr a = simplify(e.arg(0));
    if (a.is_constant()) {
      const double v = detail::apply_function(e.op(), a.value());
      if (std::isfinite(v)) return Expr::constant(v);
    }
    return Expr::unary(e.op(), a);
  }
  }
}

namespace detail {

inline Expr derivative_raw(const Expr & e, int k)
{
  auto mul = [](Expr a, Expr b) { return Expr::binary(Op::mul, std::move(a), std::move(b)); };
  switch (e.op()) {
  case Op::constant: return Expr::constant(0.0);
  case Op::variable: return Expr::constant(e.index() == k ? 1.0 : 0.0);
  case Op::neg: return Expr::unary(Op::neg, derivative_raw(e.arg(0), k));
  case Op::add: {
    std::vector<Expr> terms;
    for (const auto & a : e.args()) terms.push_back(derivative_raw(a, k));
    return Expr::nary(Op::add, std::move(terms));
  }
  case Op::sub: return Expr::binary(Op::sub, derivative_raw(e.arg(0), k), derivative_raw(e.arg(1), k));
  case Op::mul: {
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < e.args().size(); ++i) {
      std::vector<Expr> factors;
      for (std::size_t j = 0; j < e.args().size(); ++j) {
        factors.push_back(i == j ? derivative_raw(e.arg(j), k) : e.arg(j));
      }
      terms.push_back(Expr::nary(Op::mul, std::move(factors)));
    }
    return Expr::nary(Op::add, std::move(terms));
  }
  case Op::div: {
    const Expr & a = e.arg(0);
    const Expr & b = e.arg(1);
    Expr num = Expr::binary(Op::sub, mul(derivative_raw(a, k), b), mul(a, derivative_raw(b, k)));
    return Expr::binary(Op::div, num, Expr::power(b, 2));
  }
  case Op::pow: {
    const int p = e.exponent();
    return Expr::nary(Op::mul, {Expr::constant(p), Expr::power(e.arg(0), p - 1), derivative_raw(e.arg(0), k)});
  }
  case Op::sin: return mul(Expr::unary(Op::cos, e.arg(0)), derivative_raw(e.arg(0), k));
  case Op::cos:
    return mul(Expr::unary(Op::neg, Expr::unary(Op::sin, e.arg(0))), derivative_raw(e.arg(0), k));
  case Op::exp: return mul(e, derivative_raw(e.arg(0), k));
  case Op::log: return Expr::binary(Op::div, derivative_raw(e.arg(0), k), e.arg(0));
  case Op::sqrt:
    return Expr::binary(Op::div, derivative_raw(e.arg(0), k), mul(Expr::constant(2.0), e));
  case Op::abs: return mul(Expr::binary(Op::div, e.arg(0), e), derivative_raw(e.arg(0), k));
  }
  return Expr::constant(0.0);
}

}  // namespace detail

/// Simplified partial derivative with respect to the zero-based coordinate @p k.
inline Expr derivative(const Expr & e, int k) { return simplify(detail::derivative_raw(e, k)); }

inline Expr operator+(const Expr & a, const Expr & b) { return Expr::binary(Op::add, a, b); }
inline Expr operator-(const Expr & a, const Expr & b) { return Expr::binary(Op::sub, a, b); }
inline Expr operator*(const Expr & a, const Expr & b) { return Expr::binary(Op::mul, a, b); }
inline Expr operator/(const Expr & a, const Expr & b) { return Expr::binary(Op::div, a, b); }
inline Expr operator-(const Expr & a) { return Expr::unary(Op::neg, a); }

}  // namespace carnot
