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
 * @brief Flows of vector fields, approximate exponentials of commutators and the maps
 * E_{I,x}, Phi_{I,x}.
 *
 * Leg sequences are stored in APPLICATION order: legs[0] acts on the start point first. The
 * composition exp(-sY) exp(-sX) exp(sY) exp(sX)(x) is therefore the leg list
 * [(X,+s), (Y,+s), (X,-s), (Y,-s)].
 */

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "carnot/errors.hpp"
#include "carnot/vector_field.hpp"

namespace carnot {

struct IntegratorConfig
{
  /// Largest RK4 step of the first pass; the step count then doubles until converged.
  double h0{0.05};
  /// Successive step-halving results must agree to this (max-norm).
  double tol{1e-10};
  int max_substeps{1 << 16};
};

namespace detail {

/// Classical RK4 with @p steps equal steps over [0, t]. @p f(x, out) writes the field at x.
template<class State, class F>
State rk4(F && f, const State & x0, double t, int steps)
{
  const double h = t / steps;
  State x = x0;
  State k1(x.size()), k2(x.size()), k3(x.size()), k4(x.size()), tmp(x.size());
  for (int s = 0; s < steps; ++s) {
    f(x, k1);
    tmp = x + 0.5 * h * k1;
    f(tmp, k2);
    tmp = x + 0.5 * h * k2;
    f(tmp, k3);
    tmp = x + h * k3;
    f(tmp, k4);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

}  // namespace detail

/**
 * @brief Integrates x' = f(x) over [0, t] with RK4, halving the step until two successive
 * results agree within cfg.tol.
 */
template<class State, class F>
State integrate(F && f, const State & x, double t, const IntegratorConfig & cfg)
{
  if (t == 0.0) return x;
  if (!std::isfinite(t)) throw DomainError("non-finite flow time");
  int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) / cfg.h0)));
  State prev = detail::rk4(f, x, t, steps);
  if (!prev.allFinite()) throw DomainError("non-finite state while integrating flow");
  for (;;) {
    steps *= 2;
    if (steps > cfg.max_substeps) throw ConvergenceError("flow tolerance not reached within max substeps");
    State next = detail::rk4(f, x, t, steps);
    if (!next.allFinite()) throw DomainError("non-finite state while integrating flow");
    if ((next - prev).template lpNorm<Eigen::Infinity>() <= cfg.tol) return next;
    prev = std::move(next);
  }
}

/// e^{tZ}(x).
inline Point flow(const VectorField & Z, const Point & x, double t, const IntegratorConfig & cfg = {})
{
  if (x.size() != Z.dim()) throw DimensionError("flow: point dimension does not match field");
  auto f = [&Z](const Point & p, Point & out) { Z.eval_into(p.data(), out.data()); };
  return integrate(f, x, t, cfg);
}

/**
 * @brief Field sum_j c_j F_j with frozen coefficients, evaluated without building a new
 * VectorField.
 */
class FieldCombination
{
public:
  FieldCombination(std::vector<const VectorField *> fields, std::vector<double> coeffs)
      : fields_(std::move(fields)), coeffs_(std::move(coeffs))
  {}

  void operator()(const Point & x, Point & out) const
  {
    out.setZero(x.size());
    double buf[kMaxDim];
    for (std::size_t j = 0; j < fields_.size(); ++j) {
      if (coeffs_[j] == 0.0) continue;
      fields_[j]->eval_into(x.data(), buf);
      for (Eigen::Index i = 0; i < x.size(); ++i) out[i] += coeffs_[j] * buf[i];
    }
  }

private:
  std::vector<const VectorField *> fields_;
  std::vector<double> coeffs_;
};

inline Point flow(const FieldCombination & Z, const Point & x, double t, const IntegratorConfig & cfg = {})
{
  return integrate(Z, x, t, cfg);
}

struct FlowJacobian
{
  Point point;
  SquareMatrix jacobian;
};

/**
 * @brief e^{tZ}(x) together with its derivative in x, from the variational equation
 * J' = DZ(gamma) J, J(0) = I, using the symbolic Jacobian of Z.
 */
inline FlowJacobian flow_with_jacobian(const VectorField & Z, const Point & x, double t, const IntegratorConfig & cfg = {})
{
  const int n = Z.dim();
  if (x.size() != n) throw DimensionError("flow_with_jacobian: point dimension does not match field");
  std::vector<Program> dz;
  for (const auto & e : Z.jacobian()) dz.emplace_back(e);
  auto f = [&](const Eigen::VectorXd & s, Eigen::VectorXd & out) {
    const double * p = s.data();
    Z.eval_into(p, out.data());
    // out[n + i*n + k] = sum_j dZ_i/dx_j * J_jk, J stored row-major after the point.
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += dz[static_cast<std::size_t>(i * n + j)](p) * s[n + j * n + k];
        out[n + i * n + k] = acc;
      }
    }
  };
  Eigen::VectorXd s0(n + n * n);
  s0.head(n) = x;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) s0[n + i * n + k] = i == k ? 1.0 : 0.0;
  }
  const Eigen::VectorXd s1 = integrate(f, s0, t, cfg);
  FlowJacobian out{s1.head(n), SquareMatrix(n, n)};
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) out.jacobian(i, k) = s1[n + i * n + k];
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Legs and approximate exponentials
// ---------------------------------------------------------------------------------------------

/// Flow of generator X_{generator} (1-based) for a signed duration.
struct Leg
{
  int generator{1};
  double duration{0.0};

  friend bool operator==(const Leg &, const Leg &) = default;
};

/// Legs in application order; inverse reverses and negates.
inline std::vector<Leg> inverse_legs(const std::vector<Leg> & legs)
{
  std::vector<Leg> out(legs.rbegin(), legs.rend());
  for (auto & l : out) l.duration = -l.duration;
  return out;
}

namespace detail {

// C_tau(X_{w_1}, .., X_{w_l}) = C'^{-1} exp(-tau X_{w_1}) C' exp(tau X_{w_1}),  C' = C_tau(w_2..w_l)
inline std::vector<Leg> commutator_legs(const std::vector<int> & w, std::size_t from, double tau)
{
  if (from + 1 == w.size()) return {Leg{w[from], tau}};
  const std::vector<Leg> inner = commutator_legs(w, from + 1, tau);
  std::vector<Leg> out;
  out.reserve(2 * inner.size() + 2);
  out.push_back({w[from], tau});
  out.insert(out.end(), inner.begin(), inner.end());
  out.push_back({w[from], -tau});
  const std::vector<Leg> inv = inverse_legs(inner);
  out.insert(out.end(), inv.begin(), inv.end());
  return out;
}

}  // namespace detail

/// Number of legs of exp_ap(t X_w) for |w| = l: 1, 4, 10, 22, ...
inline int approx_exp_leg_count(int length) { return length <= 1 ? 1 : 2 * approx_exp_leg_count(length - 1) + 2; }

/**
 * @brief Leg sequence of exp_ap(t X_w): C_tau(w) with tau = |t|^{1/l} for t >= 0, its inverse for
 * t < 0.
 */
inline std::vector<Leg> approx_exp_legs(const Word & w, double t)
{
  if (w.empty()) throw InputError("approx_exp_legs: empty word");
  const double tau = std::pow(std::abs(t), 1.0 / w.length());
  std::vector<Leg> legs = detail::commutator_legs(w.letters(), 0, tau);
  return t < 0 ? inverse_legs(legs) : legs;
}

/// Applies @p legs to @p x in order.
inline Point replay(const std::vector<VectorField> & generators, const std::vector<Leg> & legs, const Point & x,
                    const IntegratorConfig & cfg = {})
{
  Point y = x;
  for (const auto & l : legs) {
    if (l.generator < 1 || l.generator > static_cast<int>(generators.size())) {
      throw InputError("leg generator index out of range");
    }
    if (l.duration == 0.0) continue;
    y = flow(generators[static_cast<std::size_t>(l.generator - 1)], y, l.duration, cfg);
  }
  return y;
}

/// Start point plus legs; the endpoint is defined by sequential flows.
struct PathPlan
{
  Point start;
  std::vector<Leg> legs;

  Point endpoint(const std::vector<VectorField> & generators, const IntegratorConfig & cfg = {}) const
  {
    return replay(generators, legs, start, cfg);
  }

  double total_variation() const
  {
    double s = 0.0;
    for (const auto & l : legs) s += std::abs(l.duration);
    return s;
  }
};

inline Point approx_exp(const std::vector<VectorField> & generators, const Word & w, double t, const Point & x,
                        const IntegratorConfig & cfg = {})
{
  if (t == 0.0) return x;
  return replay(generators, approx_exp_legs(w, t), x, cfg);
}

/**
 * @brief E_{I,x}(h) = exp_ap(h_1 Y_{i_1}) ... exp_ap(h_n Y_{i_n})(x).
 *
 * The rightmost factor acts first: h_n is applied to x, h_1 last.
 */
inline Point E_map(const CommutatorBasis & basis, const MultiIndex & I, const Point & x, const Point & h,
                   const IntegratorConfig & cfg = {})
{
  check_multi_index(basis, I);
  if (h.size() != I.size() || x.size() != basis.dim()) throw DimensionError("E_map: dimension mismatch");
  Point y = x;
  for (int j = I.size() - 1; j >= 0; --j) {
    y = approx_exp(basis.generators(), basis.word(I[static_cast<std::size_t>(j)]), h[j], y, cfg);
  }
  return y;
}

/// Legs of E_{I,x}(h) in application order, zero-duration factors dropped.
inline std::vector<Leg> E_map_legs(const CommutatorBasis & basis, const MultiIndex & I, const Point & h)
{
  std::vector<Leg> legs;
  for (int j = I.size() - 1; j >= 0; --j) {
    if (h[j] == 0.0) continue;
    const auto f = approx_exp_legs(basis.word(I[static_cast<std::size_t>(j)]), h[j]);
    legs.insert(legs.end(), f.begin(), f.end());
  }
  return legs;
}

/// Phi_{I,x}(u) = exp(sum_j u_j Y_{i_j})(x).
inline Point nsw_exp(const CommutatorBasis & basis, const MultiIndex & I, const Point & x, const Point & u,
                     const IntegratorConfig & cfg = {})
{
  check_multi_index(basis, I);
  if (u.size() != I.size()) throw DimensionError("nsw_exp: dimension mismatch");
  std::vector<const VectorField *> f;
  std::vector<double> c;
  for (int j = 0; j < I.size(); ++j) {
    f.push_back(&basis.field(I[static_cast<std::size_t>(j)]));
    c.push_back(u[j]);
  }
  return flow(FieldCombination(std::move(f), std::move(c)), x, 1.0, cfg);
}

/// Box weights r^{l_{i_j}}.
inline Point box_weights(const CommutatorBasis & basis, const MultiIndex & I, double r)
{
  Point w(I.size());
  for (int j = 0; j < I.size(); ++j) w[j] = std::pow(r, basis.length(I[static_cast<std::size_t>(j)]));
  return w;
}

struct NewtonConfig
{
  /// Residual target ||E(h) - y||_2.
  double tol{1e-11};
  int max_iterations{60};
  /// Forward-difference step in box-scaled coordinates.
  double fd_step{1e-7};
};

/**
 * @brief Solves E_{I,x}(h) = y by damped Newton from h = 0.
 *
 * Works in scaled coordinates h_j = r^{l_{i_j}} v_j so the Jacobian is well conditioned at box
 * scale r. Throws ConvergenceError when the iteration stalls, which usually means y is outside
 * the image of the box.
 */
inline Point E_inverse(const CommutatorBasis & basis, const MultiIndex & I, const Point & x, const Point & y, double r,
                       const IntegratorConfig & cfg = {}, const NewtonConfig & newton = {})
{
  check_multi_index(basis, I);
  const int n = I.size();
  if (r <= 0) throw InputError("E_inverse: scale must be positive");
  const Point w = box_weights(basis, I, r);
  Point h = Point::Zero(n);
  Point F = E_map(basis, I, x, h, cfg) - y;
  double res = F.norm();
  // Components that are zero up to roundoff are set to exactly zero when the residual allows it.
  auto snap = [&](Point hs) {
    for (int j = 0; j < n; ++j) {
      if (hs[j] == 0.0 || std::abs(hs[j]) > 1e-12 * w[j]) continue;
      Point t = hs;
      t[j] = 0.0;
      if ((E_map(basis, I, x, t, cfg) - y).norm() <= newton.tol) hs = t;
    }
    return hs;
  };
  for (int it = 0; it < newton.max_iterations; ++it) {
    if (res <= newton.tol) return snap(h);
    SquareMatrix J(n, n);
    for (int j = 0; j < n; ++j) {
      Point hp = h;
      hp[j] += newton.fd_step * w[j];
      J.col(j) = (E_map(basis, I, x, hp, cfg) - y - F) / newton.fd_step;
    }
    Eigen::ColPivHouseholderQR<SquareMatrix> qr(J);
    if (qr.rank() < n) throw ConvergenceError("E_inverse: singular Jacobian");
    const Point dv = qr.solve(-F);
    double alpha = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k, alpha *= 0.5) {
      Point hn = h + alpha * dv.cwiseProduct(w);
      Point Fn;
      try {
        Fn = E_map(basis, I, x, hn, cfg) - y;
      } catch (const NumericalError &) {
        continue;
      }
      const double rn = Fn.norm();
      if (rn < res * (1.0 - 1e-4 * alpha) || rn <= newton.tol) {
        h = hn;
        F = Fn;
        res = rn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (res <= newton.tol) return snap(h);
  throw ConvergenceError("E_inverse: no convergence (residual " + std::to_string(res) + ")");
}

/**
 * @brief det dE_{I,x}/dh at h, by central differences with steps fd_step * r^{l_{i_j}}.
 */
inline double E_jacobian_det(const CommutatorBasis & basis, const MultiIndex & I, const Point & x, const Point & h,
                             double r, const IntegratorConfig & cfg = {}, double fd_step = 1e-5)
{
  const int n = I.size();
  const Point w = box_weights(basis, I, r);
  SquareMatrix J(n, n);
  for (int j = 0; j < n; ++j) {
    const double d = fd_step * w[j];
    Point hp = h, hm = h;
    hp[j] += d;
    hm[j] -= d;
    J.col(j) = (E_map(basis, I, x, hp, cfg) - E_map(basis, I, x, hm, cfg)) / (2.0 * d);
  }
  return J.determinant();
}

}  // namespace carnot
