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
 * @brief Smooth vector fields on R^n, Lie brackets and the commutator basis of step kappa.
 *
 * Brackets are nested to the RIGHT:
 *
 *     X_w = [X_{w_1}, [X_{w_2}, ... [X_{w_{l-1}}, X_{w_l}] ... ]]
 *
 * so the word "12" is [X_1, X_2] and "112" is [X_1, [X_1, X_2]]. Left nesting is also common in
 * the literature; it is not what this library computes.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "carnot/errors.hpp"
#include "carnot/expr.hpp"

namespace carnot {

inline constexpr int kMaxDim = 8;

/// Point or tangent vector in R^n, n <= kMaxDim, stored without heap allocation.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using SquareMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

inline Point make_point(std::initializer_list<double> v)
{
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) p[i++] = c;
  return p;
}

inline Point make_point(const std::vector<double> & v)
{
  Point p(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<Eigen::Index>(i)] = v[i];
  return p;
}

/**
 * @brief Vector field sum_i a_i(x) d/dx_i with expression coefficients.
 *
 * Immutable; coefficients are compiled once on construction.
 */
class VectorField
{
public:
  VectorField() = default;

  explicit VectorField(std::vector<Expr> coeffs) : coeffs_(std::move(coeffs))
  {
    const int n = dim();
    if (n < 1 || n > kMaxDim) throw DimensionError("vector field dimension must be in 1.." + std::to_string(kMaxDim));
    for (const auto & c : coeffs_) {
      if (c.max_variable() >= n) throw DimensionError("coefficient references a variable beyond x" + std::to_string(n));
    }
    programs_ = std::make_shared<std::vector<Program>>();
    programs_->reserve(coeffs_.size());
    for (const auto & c : coeffs_) programs_->emplace_back(c);
  }

  /// Parses one coefficient string per coordinate.
  static VectorField parse(const std::vector<std::string> & coeffs)
  {
    const int n = static_cast<int>(coeffs.size());
    std::vector<Expr> e;
    e.reserve(coeffs.size());
    for (const auto & s : coeffs) e.push_back(simplify(parse_expr(s, n)));
    return VectorField(std::move(e));
  }

  static VectorField zero(int n) { return VectorField(std::vector<Expr>(static_cast<std::size_t>(n), Expr::constant(0.0))); }

  /// The coordinate field d/dx_{k+1}.
  static VectorField coordinate(int n, int k)
  {
    std::vector<Expr> e(static_cast<std::size_t>(n), Expr::constant(0.0));
    e[static_cast<std::size_t>(k)] = Expr::constant(1.0);
    return VectorField(std::move(e));
  }

  int dim() const { return static_cast<int>(coeffs_.size()); }
  const std::vector<Expr> & coeffs() const { return coeffs_; }
  const Expr & coeff(int i) const { return coeffs_[static_cast<std::size_t>(i)]; }

  bool is_zero() const
  {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Expr & c) { return c.is_zero(); });
  }

  /// Unchecked evaluation into @p out; use eval() when finiteness matters.
  void eval_into(const double * x, double * out) const
  {
    const auto & p = *programs_;
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i](x);
  }

  Point eval(const Point & x) const
  {
    if (x.size() != dim()) throw DimensionError("point dimension does not match field dimension");
    Point out(dim());
    eval_into(x.data(), out.data());
    if (!out.allFinite()) throw DomainError("non-finite vector field value");
    return out;
  }

  /// Directional derivative of a scalar expression: X f = sum_i a_i df/dx_i.
  Expr apply(const Expr & f) const
  {
    std::vector<Expr> terms;
    for (int i = 0; i < dim(); ++i) terms.push_back(coeff(i) * derivative(f, i));
    return simplify(Expr::nary(Op::add, std::move(terms)));
  }

  /// Symbolic Jacobian entries d a_i / d x_j, row-major.
  std::vector<Expr> jacobian() const
  {
    std::vector<Expr> j;
    for (int i = 0; i < dim(); ++i) {
      for (int k = 0; k < dim(); ++k) j.push_back(derivative(coeff(i), k));
    }
    return j;
  }

  std::string to_string() const
  {
    std::string s = "(";
    for (int i = 0; i < dim(); ++i) {
      if (i) s += ", ";
      s += carnot::to_string(coeff(i));
    }
    return s + ")";
  }

private:
  std::vector<Expr> coeffs_;
  std::shared_ptr<std::vector<Program>> programs_;
};

inline Point eval_field(const VectorField & X, const Point & x) { return X.eval(x); }

/**
 * @brief [X, Y]_i = sum_j (X_j d_j Y_i - Y_j d_j X_i), simplified.
 *
 * Structurally identical arguments short-circuit to the zero field.
 */
inline VectorField lie_bracket(const VectorField & X, const VectorField & Y)
{
  if (X.dim() != Y.dim()) throw DimensionError("lie_bracket: dimension mismatch");
  const int n = X.dim();
  bool same = true;
  for (int i = 0; i < n && same; ++i) same = structurally_equal(X.coeff(i), Y.coeff(i));
  if (same) return VectorField::zero(n);
  std::vector<Expr> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<Expr> terms;
    for (int j = 0; j < n; ++j) {
      terms.push_back(X.coeff(j) * derivative(Y.coeff(i), j));
      terms.push_back(-(Y.coeff(j) * derivative(X.coeff(i), j)));
    }
    out.push_back(simplify(Expr::nary(Op::add, std::move(terms))));
  }
  return VectorField(std::move(out));
}

/// Word over the alphabet {1..m}; letters are 1-based as in the usual notation.
class Word
{
public:
  Word() = default;
  explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {}

  /// "12" -> {1, 2}; letters must be single digits 1..9.
  static Word parse(std::string_view s)
  {
    std::vector<int> l;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const char c = s[i];
      if (c < '1' || c > '9') throw ParseError("word letters must be digits 1..9", i);
      l.push_back(c - '0');
    }
    if (l.empty()) throw InputError("empty word");
    return Word(std::move(l));
  }

  int length() const { return static_cast<int>(letters_.size()); }
  bool empty() const { return letters_.empty(); }
  int operator[](std::size_t i) const { return letters_[i]; }
  const std::vector<int> & letters() const { return letters_; }

  Word tail() const { return Word(std::vector<int>(letters_.begin() + 1, letters_.end())); }

  std::string to_string() const
  {
    std::string s;
    for (int l : letters_) s += std::to_string(l);
    return s;
  }

  friend bool operator==(const Word &, const Word &) = default;
  /// Length first, then lexicographic.
  friend bool operator<(const Word & a, const Word & b)
  {
    if (a.length() != b.length()) return a.length() < b.length();
    return a.letters_ < b.letters_;
  }

private:
  std::vector<int> letters_;
};

/// X_w, right-nested: X_{w_1} for |w| = 1, else [X_{w_1}, X_{w_2...w_l}].
inline VectorField commutator_field(const std::vector<VectorField> & generators, const Word & w)
{
  if (w.empty()) throw InputError("commutator_field: empty word");
  const int m = static_cast<int>(generators.size());
  for (int l : w.letters()) {
    if (l < 1 || l > m) throw InputError("word letter " + std::to_string(l) + " outside 1.." + std::to_string(m));
  }
  VectorField acc = generators[static_cast<std::size_t>(w[static_cast<std::size_t>(w.length() - 1)] - 1)];
  for (int i = w.length() - 2; i >= 0; --i) {
    acc = lie_bracket(generators[static_cast<std::size_t>(w[static_cast<std::size_t>(i)] - 1)], acc);
  }
  return acc;
}

/**
 * @brief The family Y_1..Y_q of commutators of length <= kappa, ordered by (length, word).
 *
 * Y_1..Y_m are the generators. With pruning, symbolically zero brackets are dropped; linearly
 * dependent brackets (e.g. X_12 = -X_21) are kept.
 */
class CommutatorBasis
{
public:
  struct Entry
  {
    Word word;
    VectorField field;
  };

  CommutatorBasis() = default;
  CommutatorBasis(std::vector<VectorField> generators, int step, std::vector<Entry> entries)
      : generators_(std::move(generators)), step_(step), entries_(std::move(entries))
  {}

  const std::vector<VectorField> & generators() const { return generators_; }
  int step() const { return step_; }
  int dim() const { return generators_.empty() ? 0 : generators_.front().dim(); }
  int num_generators() const { return static_cast<int>(generators_.size()); }
  int size() const { return static_cast<int>(entries_.size()); }
  const std::vector<Entry> & entries() const { return entries_; }

  /// @param j 1-based entry index
  const Entry & entry(int j) const { return entries_.at(static_cast<std::size_t>(j - 1)); }
  const VectorField & field(int j) const { return entry(j).field; }
  const Word & word(int j) const { return entry(j).word; }
  int length(int j) const { return entry(j).word.length(); }

  std::vector<int> lengths() const
  {
    std::vector<int> l;
    for (const auto & e : entries_) l.push_back(e.word.length());
    return l;
  }

  /// 1-based index of @p w, or 0 when absent.
  int index_of(const Word & w) const
  {
    for (std::size_t j = 0; j < entries_.size(); ++j) {
      if (entries_[j].word == w) return static_cast<int>(j + 1);
    }
    return 0;
  }

  /// Columns Y_1(x)..Y_q(x) as an n x q matrix.
  Eigen::MatrixXd frame(const Point & x) const
  {
    Eigen::MatrixXd F(dim(), size());
    for (int j = 0; j < size(); ++j) F.col(j) = entries_[static_cast<std::size_t>(j)].field.eval(x);
    return F;
  }

private:
  std::vector<VectorField> generators_;
  int step_{1};
  std::vector<Entry> entries_;
};

inline CommutatorBasis enumerate_basis(const std::vector<VectorField> & generators, int step, bool prune = true)
{
  if (step < 1) throw InputError("step must be >= 1");
  if (generators.empty()) throw InputError("at least one generator required");
  const int n = generators.front().dim();
  for (const auto & g : generators) {
    if (g.dim() != n) throw DimensionError("generators have different dimensions");
  }
  const int m = static_cast<int>(generators.size());
  std::vector<CommutatorBasis::Entry> entries;
  // Fields of the previous length, indexed by word in lexicographic order, unpruned so that
  // longer words can still be formed from them.
  std::vector<CommutatorBasis::Entry> level;
  for (int i = 0; i < m; ++i) level.push_back({Word({i + 1}), generators[static_cast<std::size_t>(i)]});
  for (int len = 1; len <= step; ++len) {
    for (const auto & e : level) {
      if (!prune || !e.field.is_zero()) entries.push_back(e);
    }
    if (len == step) break;
    std::vector<CommutatorBasis::Entry> next;
    for (int a = 1; a <= m; ++a) {
      for (const auto & e : level) {
        std::vector<int> letters{a};
        letters.insert(letters.end(), e.word.letters().begin(), e.word.letters().end());
        VectorField f = e.field.is_zero() ? VectorField::zero(n)
                                          : lie_bracket(generators[static_cast<std::size_t>(a - 1)], e.field);
        next.push_back({Word(std::move(letters)), std::move(f)});
      }
    }
    level = std::move(next);
  }
  return CommutatorBasis(generators, step, std::move(entries));
}

struct HormanderCheck
{
  bool satisfied{true};
  std::vector<int> ranks;
  /// Indices into the sample list where the rank is below n.
  std::vector<std::size_t> failing;
};

/**
 * @brief Numerical rank of [Y_1(x) .. Y_q(x)] at each sample: singular values above
 * tol * largest count.
 */
inline HormanderCheck check_hormander(const CommutatorBasis & basis, const std::vector<Point> & samples, double tol = 1e-10)
{
  if (samples.empty()) throw InputError("check_hormander: empty sample set");
  HormanderCheck out;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const Eigen::MatrixXd F = basis.frame(samples[s]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(F);
    const auto & sv = svd.singularValues();
    int rank = 0;
    const double top = sv.size() ? sv[0] : 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (top > 0 && sv[i] > tol * top) ++rank;
    }
    out.ranks.push_back(rank);
    if (rank < basis.dim()) {
      out.satisfied = false;
      out.failing.push_back(s);
    }
  }
  return out;
}

/**
 * @brief n-tuple I = (i_1, .., i_n) of 1-based indices into a CommutatorBasis.
 */
struct MultiIndex
{
  std::vector<int> idx;

  MultiIndex() = default;
  MultiIndex(std::initializer_list<int> i) : idx(i) {}
  explicit MultiIndex(std::vector<int> i) : idx(std::move(i)) {}

  int size() const { return static_cast<int>(idx.size()); }
  int operator[](std::size_t j) const { return idx[j]; }

  std::string to_string() const
  {
    std::string s = "(";
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (j) s += ",";
      s += std::to_string(idx[j]);
    }
    return s + ")";
  }

  friend bool operator==(const MultiIndex &, const MultiIndex &) = default;
};

/// l(I) = l_{i_1} + .. + l_{i_n}.
inline int ell(const CommutatorBasis & basis, const MultiIndex & I)
{
  int s = 0;
  for (int i : I.idx) s += basis.length(i);
  return s;
}

inline void check_multi_index(const CommutatorBasis & basis, const MultiIndex & I)
{
  if (I.size() != basis.dim()) throw DimensionError("multi-index length must equal the ambient dimension");
  for (int i : I.idx) {
    if (i < 1 || i > basis.size()) throw InputError("multi-index entry " + std::to_string(i) + " outside 1.." + std::to_string(basis.size()));
  }
}

}  // namespace carnot
