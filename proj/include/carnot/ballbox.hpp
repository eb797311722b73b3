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
 * @brief Determinants lambda_I, eta-maximal selection, anisotropic boxes Q_I(r) and the volume
 * proxy max_K |lambda_K(x)| r^{l(K)}.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "carnot/errors.hpp"
#include "carnot/flows.hpp"
#include "carnot/random.hpp"
#include "carnot/vector_field.hpp"

namespace carnot {

struct BallBoxConstants
{
  double eta{0.5};
  double eps_hat{0.3};
  double C_hat{2.0};
  double r0{0.5};

  void validate() const
  {
    if (!(eta > 0 && eta < 1)) throw InputError("eta must lie in (0,1)");
    if (!(eps_hat > 0 && eps_hat < 1)) throw InputError("eps_hat must lie in (0,1)");
    if (!(C_hat > 1)) throw InputError("C_hat must exceed 1");
    if (!(r0 > 0)) throw InputError("r0 must be positive");
  }
};

/// det(Y_{i_1}(x), .., Y_{i_n}(x)).
inline double lambda_I(const CommutatorBasis & basis, const MultiIndex & I, const Point & x)
{
  check_multi_index(basis, I);
  const int n = basis.dim();
  SquareMatrix M(n, n);
  for (int j = 0; j < n; ++j) M.col(j) = basis.field(I[static_cast<std::size_t>(j)]).eval(x);
  return M.determinant();
}

/**
 * @brief All |lambda_K(x)| over strictly increasing K, with l(K).
 *
 * Permuting K only flips the sign of lambda_K and leaves l(K) unchanged, and K with a repeated
 * index has lambda_K = 0, so the increasing tuples carry every value the max over {1..q}^n can
 * take. The increasing representative is also the lexicographically smallest of its orbit.
 */
class DeterminantTable
{
public:
  struct Row
  {
    MultiIndex K;
    double abs_lambda;
    int ell;
  };

  DeterminantTable(const CommutatorBasis & basis, const Point & x)
  {
    const int n = basis.dim();
    const int q = basis.size();
    if (x.size() != n) throw DimensionError("DeterminantTable: point dimension mismatch");
    const Eigen::MatrixXd F = basis.frame(x);
    const std::vector<int> len = basis.lengths();
    if (q < n) return;
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) idx[static_cast<std::size_t>(j)] = j;
    SquareMatrix M(n, n);
    for (;;) {
      int l = 0;
      for (int j = 0; j < n; ++j) {
        M.col(j) = F.col(idx[static_cast<std::size_t>(j)]);
        l += len[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
      }
      std::vector<int> K(idx);
      for (int & k : K) ++k;
      rows_.push_back({MultiIndex(std::move(K)), std::abs(M.determinant()), l});
      int j = n - 1;
      while (j >= 0 && idx[static_cast<std::size_t>(j)] == q - n + j) --j;
      if (j < 0) break;
      ++idx[static_cast<std::size_t>(j)];
      for (int k = j + 1; k < n; ++k) idx[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(k - 1)] + 1;
    }
  }

  const std::vector<Row> & rows() const { return rows_; }

  /// max_K |lambda_K| r^{l(K)}.
  double max_value(double r) const
  {
    double m = 0.0;
    for (const auto & row : rows_) m = std::max(m, row.abs_lambda * std::pow(r, row.ell));
    return m;
  }

  /// Row attaining the max; ties (relative 1e-12) go to the smallest (l(K), K).
  const Row & argmax(double r) const
  {
    const double m = max_value(r);
    if (!(m > 0)) throw HormanderError("all determinants vanish: vector fields do not span at this point");
    const Row * best = nullptr;
    for (const auto & row : rows_) {
      const double v = row.abs_lambda * std::pow(r, row.ell);
      if (v < m * (1.0 - 1e-12)) continue;
      if (!best || row.ell < best->ell || (row.ell == best->ell && row.K.idx < best->K.idx)) best = &row;
    }
    return *best;
  }

private:
  std::vector<Row> rows_;
};

inline bool is_eta_maximal(const CommutatorBasis & basis, const MultiIndex & I, const Point & x, double r, double eta)
{
  if (!(r > 0)) throw InputError("is_eta_maximal: r must be positive");
  const double lhs = std::abs(lambda_I(basis, I, x)) * std::pow(r, ell(basis, I));
  return lhs > eta * DeterminantTable(basis, x).max_value(r);
}

/// argmax_K |lambda_K(x)| r^{l(K)}, smallest (l(K), K) on ties. Throws HormanderError if none is nonzero.
inline MultiIndex select_maximal(const CommutatorBasis & basis, const Point & x, double r)
{
  if (!(r > 0)) throw InputError("select_maximal: r must be positive");
  return DeterminantTable(basis, x).argmax(r).K;
}

inline double volume_proxy(const CommutatorBasis & basis, const Point & x, double r)
{
  if (!(r > 0)) throw InputError("volume_proxy: r must be positive");
  return DeterminantTable(basis, x).max_value(r);
}

/// ||h||_I = max_j |h_j|^{1/l_{i_j}}.
inline double box_norm(const CommutatorBasis & basis, const MultiIndex & I, const Point & h)
{
  if (h.size() != I.size()) throw DimensionError("box_norm: dimension mismatch");
  double m = 0.0;
  for (int j = 0; j < I.size(); ++j) {
    m = std::max(m, std::pow(std::abs(h[j]), 1.0 / basis.length(I[static_cast<std::size_t>(j)])));
  }
  return m;
}

/// h in Q_I(r), i.e. ||h||_I < r.
inline bool box_contains(const CommutatorBasis & basis, const MultiIndex & I, double r, const Point & h)
{
  return box_norm(basis, I, h) < r;
}

/// Lebesgue measure of Q_I(r): prod_j 2 r^{l_{i_j}}.
inline double box_volume(const CommutatorBasis & basis, const MultiIndex & I, double r)
{
  return std::pow(2.0, I.size()) * std::pow(r, ell(basis, I));
}

/// Uniform samples of Q_I(r).
inline std::vector<Point> sample_box(const CommutatorBasis & basis, const MultiIndex & I, double r, std::size_t count,
                                     std::uint64_t seed)
{
  if (!(r > 0)) throw InputError("sample_box: r must be positive");
  const Point w = box_weights(basis, I, r);
  RandomStream rng(seed, 0x62b0);
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    Point h(I.size());
    for (int j = 0; j < I.size(); ++j) {
      // open interval: redraw the measure-zero endpoint
      double u;
      do u = rng.uniform(-1.0, 1.0);
      while (u == -1.0);
      h[j] = u * w[j];
    }
    out.push_back(h);
  }
  return out;
}

/// Open interval (lo, hi) of radii; empty when lo >= hi.
struct RadiusInterval
{
  double lo{0.0};
  double hi{0.0};
  bool hi_closed{false};

  bool empty() const { return !(lo < hi); }
  bool contains(double r) const { return r > lo && (hi_closed ? r <= hi : r < hi); }
};

/**
 * @brief Radii r in (0, r0] at which (I, x, C_hat r) is eta-maximal.
 *
 * Each competitor K contributes a half-line a (C_hat r)^{l(I)} > eta |lambda_K| (C_hat r)^{l(K)}
 * with a = |lambda_I(x)|; the answer is their intersection with (0, r0].
 */
inline RadiusInterval maximal_annulus(const CommutatorBasis & basis, const MultiIndex & I, const Point & x,
                                      const BallBoxConstants & c)
{
  const double a = std::abs(lambda_I(basis, I, x));
  const int lI = ell(basis, I);
  RadiusInterval out{0.0, c.r0, true};
  if (!(a > 0)) return {0.0, 0.0, false};
  const DeterminantTable table(basis, x);
  for (const auto & row : table.rows()) {
    const double b = c.eta * row.abs_lambda;
    if (b == 0.0) continue;
    const int e = lI - row.ell;
    if (e == 0) {
      if (!(a > b)) return {0.0, 0.0, false};
      continue;
    }
    // rho^e > b/a with rho = C_hat r
    const double rho = std::pow(b / a, 1.0 / e);
    const double r = rho / c.C_hat;
    if (e > 0) {
      out.lo = std::max(out.lo, r);
    } else if (r <= out.hi) {
      out.hi = r;
      out.hi_closed = false;
    }
  }
  return out;
}

/// Monte Carlo measure estimate with its standard error.
struct VolumeEstimate
{
  double value{0.0};
  double stderr_{0.0};
  std::size_t hits{0};
  std::size_t count{0};
};

/**
 * @brief Lebesgue measure of {y : inside(y)} inside the box [lo, hi] by uniform sampling.
 *
 * @p inside is the ball indicator, typically d_est(x, y) < r for some estimator.
 */
inline VolumeEstimate ball_volume_mc(const Point & lo, const Point & hi, const std::function<bool(const Point &)> & inside,
                                     std::size_t count, std::uint64_t seed)
{
  if (lo.size() != hi.size()) throw DimensionError("ball_volume_mc: bounding box dimension mismatch");
  double box = 1.0;
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(hi[i] > lo[i])) throw InputError("ball_volume_mc: empty bounding box");
    box *= hi[i] - lo[i];
  }
  VolumeEstimate est;
  est.count = count;
  if (count == 0) return est;
  RandomStream rng(seed, 0xba11);
  Point y(lo.size());
  for (std::size_t s = 0; s < count; ++s) {
    for (Eigen::Index i = 0; i < lo.size(); ++i) y[i] = rng.uniform(lo[i], hi[i]);
    if (inside(y)) ++est.hits;
  }
  const double p = static_cast<double>(est.hits) / static_cast<double>(count);
  est.value = box * p;
  est.stderr_ = box * std::sqrt(p * (1.0 - p) / static_cast<double>(count));
  return est;
}

}  // namespace carnot
