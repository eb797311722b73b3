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
 * @brief Upper-bound estimators for the control distances d and rho, the box-distance proxy
 * and explicit point connection.
 *
 * Both control distances share one model: directions D_1..D_w with exponents e_j, and
 * piecewise-constant controls b^{(k)} with |b^{(k)}| <= 1 driving
 *
 *     gamma' = sum_j b_j^{(k)} r^{e_j} D_j(gamma)
 *
 * over consecutive segments whose durations sum to 1. For d the directions are X_1..X_m with
 * e_j = 1, for rho they are Y_1..Y_q with e_j = l_j. The estimate is the smallest r at which the
 * endpoint can be matched to y, found by doubling and then bisection on r, where each fixed-r
 * problem is solved by projected Levenberg-Marquardt with exact sensitivities from the
 * variational equations.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "carnot/ballbox.hpp"
#include "carnot/errors.hpp"
#include "carnot/flows.hpp"
#include "carnot/parallel.hpp"
#include "carnot/random.hpp"
#include "carnot/vector_field.hpp"

namespace carnot {

/// Piecewise-constant control on [0, 1].
struct ControlPath
{
  double r{0.0};
  /// Controls per segment (m for d, q for rho).
  int width{0};
  /// Row-major segments x width.
  std::vector<double> b;
  /// Segment durations; empty means 1/K each.
  std::vector<double> durations;

  int segments() const { return width == 0 ? 0 : static_cast<int>(b.size()) / width; }
  double duration(int k) const { return durations.empty() ? 1.0 / segments() : durations[static_cast<std::size_t>(k)]; }
  double control(int k, int j) const { return b[static_cast<std::size_t>(k * width + j)]; }

  /// max_k |b^{(k)}|.
  double max_control_norm() const
  {
    double m = 0.0;
    for (int k = 0; k < segments(); ++k) {
      double s = 0.0;
      for (int j = 0; j < width; ++j) s += control(k, j) * control(k, j);
      m = std::max(m, std::sqrt(s));
    }
    return m;
  }
};

/// Directions, exponents and direction Jacobians for one of the two control distances.
class ControlModel
{
public:
  ControlModel(std::vector<VectorField> directions, std::vector<int> exponents)
      : directions_(std::move(directions)), exponents_(std::move(exponents))
  {
    if (directions_.empty() || directions_.size() != exponents_.size()) throw InputError("ControlModel: bad direction list");
    n_ = directions_.front().dim();
    for (const auto & d : directions_) {
      if (d.dim() != n_) throw DimensionError("ControlModel: direction dimensions differ");
      std::vector<Program> jac;
      for (const auto & e : d.jacobian()) jac.emplace_back(e);
      jacobians_.push_back(std::move(jac));
    }
  }

  /// X_1..X_m with unit exponents (the distance d).
  static ControlModel horizontal(const CommutatorBasis & basis)
  {
    return ControlModel(basis.generators(), std::vector<int>(static_cast<std::size_t>(basis.num_generators()), 1));
  }

  /// Y_1..Y_q with exponents l_j (the distance rho).
  static ControlModel extended(const CommutatorBasis & basis)
  {
    std::vector<VectorField> f;
    for (const auto & e : basis.entries()) f.push_back(e.field);
    return ControlModel(std::move(f), basis.lengths());
  }

  int dim() const { return n_; }
  int width() const { return static_cast<int>(directions_.size()); }
  int exponent(int j) const { return exponents_[static_cast<std::size_t>(j)]; }
  bool unit_exponents() const
  {
    return std::all_of(exponents_.begin(), exponents_.end(), [](int e) { return e == 1; });
  }

  /// Endpoint of @p path from @p x.
  Point endpoint(const ControlPath & path, const Point & x, const IntegratorConfig & cfg) const
  {
    Point s = x;
    for (int k = 0; k < path.segments(); ++k) s = segment(path, k, s, cfg);
    return s;
  }

  Point segment(const ControlPath & path, int k, const Point & s, const IntegratorConfig & cfg) const
  {
    std::vector<const VectorField *> f;
    std::vector<double> c;
    for (int j = 0; j < width(); ++j) {
      const double cj = path.control(k, j) * std::pow(path.r, exponent(j));
      if (cj == 0.0) continue;
      f.push_back(&directions_[static_cast<std::size_t>(j)]);
      c.push_back(cj);
    }
    if (f.empty()) return s;
    return flow(FieldCombination(std::move(f), std::move(c)), s, path.duration(k), cfg);
  }

  struct Linearization
  {
    Point endpoint;
    /// d endpoint / d b, n x (K width).
    Eigen::MatrixXd jacobian;
  };

  /// Endpoint and its exact derivative in the controls, by the variational equations per segment.
  Linearization linearize(const ControlPath & path, const Point & x, const IntegratorConfig & cfg) const
  {
    const int n = n_, w = width(), K = path.segments();
    std::vector<SquareMatrix> S(static_cast<std::size_t>(K));
    std::vector<Eigen::MatrixXd> B(static_cast<std::size_t>(K));
    Point s = x;
    for (int k = 0; k < K; ++k) sensitivity(path, k, s, S[static_cast<std::size_t>(k)], B[static_cast<std::size_t>(k)], cfg);
    Linearization out{s, Eigen::MatrixXd(n, K * w)};
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
    for (int k = K - 1; k >= 0; --k) {
      out.jacobian.middleCols(k * w, w) = P * B[static_cast<std::size_t>(k)];
      P = P * S[static_cast<std::size_t>(k)];
    }
    return out;
  }

private:
  // Advances s over segment k; S = ds_end/ds_start, Bk = ds_end/db^{(k)}.
  void sensitivity(const ControlPath & path, int k, Point & s, SquareMatrix & S, Eigen::MatrixXd & Bk,
                   const IntegratorConfig & cfg) const
  {
    const int n = n_, w = width();
    std::vector<double> weight(static_cast<std::size_t>(w)), c(static_cast<std::size_t>(w));
    for (int j = 0; j < w; ++j) {
      weight[static_cast<std::size_t>(j)] = std::pow(path.r, exponent(j));
      c[static_cast<std::size_t>(j)] = path.control(k, j) * weight[static_cast<std::size_t>(j)];
    }
    const int size = n + n * n + n * w;
    auto rhs = [&](const Eigen::VectorXd & z, Eigen::VectorXd & out) {
      const double * p = z.data();
      double buf[kMaxDim];
      SquareMatrix A = SquareMatrix::Zero(n, n);
      out.setZero(size);
      for (int j = 0; j < w; ++j) {
        const auto & D = directions_[static_cast<std::size_t>(j)];
        D.eval_into(p, buf);
        const double cj = c[static_cast<std::size_t>(j)];
        const double wj = weight[static_cast<std::size_t>(j)];
        for (int i = 0; i < n; ++i) {
          out[i] += cj * buf[i];
          out[n + n * n + j * n + i] = wj * buf[i];
        }
        if (cj == 0.0) continue;
        const auto & J = jacobians_[static_cast<std::size_t>(j)];
        for (int i = 0; i < n; ++i) {
          for (int l = 0; l < n; ++l) A(i, l) += cj * J[static_cast<std::size_t>(i * n + l)](p);
        }
      }
      Eigen::Map<const Eigen::MatrixXd> Sz(p + n, n, n);
      Eigen::Map<const Eigen::MatrixXd> Bz(p + n + n * n, n, w);
      Eigen::Map<Eigen::MatrixXd>(out.data() + n, n, n) = A * Sz;
      Eigen::Map<Eigen::MatrixXd>(out.data() + n + n * n, n, w) += A * Bz;
    };
    Eigen::VectorXd z = Eigen::VectorXd::Zero(size);
    z.head(n) = s;
    for (int i = 0; i < n; ++i) z[n + i * n + i] = 1.0;
    z = integrate(rhs, z, path.duration(k), cfg);
    s = z.head(n);
    S = Eigen::Map<const Eigen::MatrixXd>(z.data() + n, n, n);
    Bk = Eigen::Map<const Eigen::MatrixXd>(z.data() + n + n * n, n, w);
  }

  std::vector<VectorField> directions_;
  std::vector<int> exponents_;
  std::vector<std::vector<Program>> jacobians_;
  int n_{0};
};

struct DistanceConfig
{
  int segments{8};
  int starts{16};
  /// Feasibility: endpoint error < tol (1 + |y|).
  double tol{1e-6};
  double r_max{100.0};
  /// Bisection stops once hi - lo <= rel_precision * hi.
  double rel_precision{1e-4};
  int max_iterations{40};
  int threads{1};
  IntegratorConfig integrator{0.25, 1e-11, 1 << 16};
  /// Extra starting controls, each polished at its own r and durations.
  std::vector<ControlPath> candidates;
};

struct DistanceEstimate
{
  double value{0.0};
  /// |replay(witness) - y|.
  double endpoint_error{0.0};
  /// tol (1 + |y|) the witness was accepted against.
  double tolerance{0.0};
  ControlPath witness;
  int feasible_starts{0};
};

namespace detail {

struct FixedRResult
{
  ControlPath path;
  double error{std::numeric_limits<double>::infinity()};
};

inline void project_controls(ControlPath & p)
{
  for (int k = 0; k < p.segments(); ++k) {
    double s = 0.0;
    for (int j = 0; j < p.width; ++j) s += p.control(k, j) * p.control(k, j);
    if (s > 1.0) {
      const double f = 1.0 / std::sqrt(s);
      for (int j = 0; j < p.width; ++j) p.b[static_cast<std::size_t>(k * p.width + j)] *= f;
    }
  }
}

// Same physical path at scale r_new: c = b r^e unchanged.
inline ControlPath rescale(const ControlModel & model, ControlPath p, double r_new)
{
  for (int k = 0; k < p.segments(); ++k) {
    for (int j = 0; j < p.width; ++j) p.b[static_cast<std::size_t>(k * p.width + j)] *= std::pow(p.r / r_new, model.exponent(j));
  }
  p.r = r_new;
  return p;
}

// Smallest r' <= p.r at which the same physical path stays admissible.
inline ControlPath tighten(const ControlModel & model, const ControlPath & p)
{
  const double m = p.max_control_norm();
  if (m == 0.0) {
    ControlPath z = p;
    z.r = 0.0;
    return z;
  }
  if (model.unit_exponents()) return rescale(model, p, p.r * m);
  auto worst = [&](double rp) {
    double g = 0.0;
    for (int k = 0; k < p.segments(); ++k) {
      double s = 0.0;
      for (int j = 0; j < p.width; ++j) {
        const double v = p.control(k, j) * std::pow(p.r / rp, model.exponent(j));
        s += v * v;
      }
      g = std::max(g, s);
    }
    return g;
  };
  double lo = p.r * std::min(m, 1.0) * 1e-3, hi = p.r;
  while (worst(lo) <= 1.0) lo *= 1e-3;
  for (int it = 0; it < 100 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (worst(mid) <= 1.0 ? hi : lo) = mid;
  }
  ControlPath out = rescale(model, p, hi);
  project_controls(out);
  return out;
}

// Projected Levenberg-Marquardt on endpoint(b) = y at fixed r.
inline FixedRResult solve_fixed_r(const ControlModel & model, const Point & x, const Point & y, ControlPath p,
                                  double target, const DistanceConfig & cfg)
{
  const int n = model.dim();
  project_controls(p);
  FixedRResult best;
  ControlModel::Linearization lin;
  try {
    lin = model.linearize(p, x, cfg.integrator);
  } catch (const NumericalError &) {
    best.path = p;
    return best;
  }
  Point F = lin.endpoint - y;
  double err = F.norm();
  double mu = 1e-6;
  int slow = 0;
  for (int it = 0; it < cfg.max_iterations && err > target; ++it) {
    const Eigen::MatrixXd JJt = lin.jacobian * lin.jacobian.transpose();
    const double scale = std::max(JJt.trace() / n, 1e-300);
    const Eigen::VectorXd lambda = (JJt + mu * scale * Eigen::MatrixXd::Identity(n, n)).ldlt().solve(F);
    const Eigen::VectorXd step = -lin.jacobian.transpose() * lambda;
    ControlPath trial = p;
    for (std::size_t i = 0; i < trial.b.size(); ++i) trial.b[i] += step[static_cast<Eigen::Index>(i)];
    project_controls(trial);
    double terr = std::numeric_limits<double>::infinity();
    try {
      terr = (model.endpoint(trial, x, cfg.integrator) - y).norm();
    } catch (const NumericalError &) {
    }
    if (terr < err) {
      slow = terr > 0.9 * err ? slow + 1 : 0;
      p = std::move(trial);
      err = terr;
      mu = std::max(mu / 3.0, 1e-12);
      if (slow >= 4 || err <= target) break;
      try {
        lin = model.linearize(p, x, cfg.integrator);
      } catch (const NumericalError &) {
        break;
      }
      F = lin.endpoint - y;
    } else {
      mu *= 8.0;
      if (mu > 1e8) break;
    }
  }
  best.path = std::move(p);
  best.error = err;
  return best;
}

struct StartOutcome
{
  bool ok{false};
  ControlPath path;
  double error{0.0};
};

// Doubling then bisection on r from one initial control.
inline StartOutcome run_start(const ControlModel & model, const Point & x, const Point & y, ControlPath p, bool grow,
                              const DistanceConfig & cfg)
{
  const double feas = cfg.tol * (1.0 + y.norm());
  const double target = 0.01 * feas;
  StartOutcome out;
  FixedRResult sol = solve_fixed_r(model, x, y, p, target, cfg);
  double lo = 0.0;
  while (!(sol.error < feas)) {
    if (!grow) return out;
    lo = sol.path.r;
    const double r = 2.0 * sol.path.r;
    if (r > cfg.r_max) return out;
    sol = solve_fixed_r(model, x, y, rescale(model, sol.path, r), target, cfg);
  }
  ControlPath best = tighten(model, sol.path);
  double best_err = sol.error;
  for (int it = 0; it < 200 && best.r - lo > cfg.rel_precision * best.r; ++it) {
    const double mid = lo == 0.0 ? 0.5 * best.r : 0.5 * (lo + best.r);
    ControlPath trial = rescale(model, best, mid);
    FixedRResult s = solve_fixed_r(model, x, y, std::move(trial), target, cfg);
    if (s.error < feas) {
      ControlPath t = tighten(model, s.path);
      if (t.r < best.r) {
        best = std::move(t);
        best_err = s.error;
      } else {
        lo = mid;
      }
    } else {
      lo = mid;
    }
  }
  out.ok = true;
  out.path = std::move(best);
  out.error = best_err;
  return out;
}

}  // namespace detail

/**
 * @brief Smallest feasible r over multi-starts, for an arbitrary control model.
 *
 * Start 0 uses zero controls; the others draw b^{(k)} uniformly in the unit ball from per-start
 * streams split off @p seed. Throws NoPathFound if no start is feasible below cfg.r_max.
 */
inline DistanceEstimate control_distance_upper(const ControlModel & model, const Point & x, const Point & y,
                                               const DistanceConfig & cfg, std::uint64_t seed)
{
  if (x.size() != model.dim() || y.size() != model.dim()) throw DimensionError("distance: point dimension mismatch");
  if (cfg.segments < 1 || cfg.starts < 1) throw InputError("distance: segments and starts must be positive");
  DistanceEstimate est;
  est.tolerance = cfg.tol * (1.0 + y.norm());
  const int w = model.width();
  if ((x - y).norm() == 0.0) {
    est.witness = ControlPath{0.0, w, {}, {}};
    return est;
  }
  int kappa = 1;
  for (int j = 0; j < w; ++j) kappa = std::max(kappa, model.exponent(j));
  const double delta = (x - y).norm();
  const double r_init = std::max(delta, std::pow(delta, 1.0 / kappa));

  const std::size_t nstarts = static_cast<std::size_t>(cfg.starts) + cfg.candidates.size();
  RandomStream root(seed, 0xd157);
  auto run = [&](std::size_t s) {
    if (s >= static_cast<std::size_t>(cfg.starts)) {
      const ControlPath & c = cfg.candidates[s - static_cast<std::size_t>(cfg.starts)];
      if (c.width != w) throw InputError("distance: candidate control width mismatch");
      return detail::run_start(model, x, y, c, false, cfg);
    }
    ControlPath p{std::min(r_init, cfg.r_max), w, std::vector<double>(static_cast<std::size_t>(cfg.segments * w), 0.0), {}};
    if (s > 0) {
      RandomStream rng = root.split(s);
      for (int k = 0; k < cfg.segments; ++k) {
        // uniform in the unit ball by rejection
        for (;;) {
          double n2 = 0.0;
          for (int j = 0; j < w; ++j) {
            const double v = rng.uniform(-1.0, 1.0);
            p.b[static_cast<std::size_t>(k * w + j)] = v;
            n2 += v * v;
          }
          if (n2 <= 1.0) break;
        }
      }
    }
    return detail::run_start(model, x, y, std::move(p), true, cfg);
  };
  const auto outcomes = parallel_map(nstarts, cfg.threads, run);
  const detail::StartOutcome * best = nullptr;
  for (const auto & o : outcomes) {
    if (!o.ok || o.path.r > cfg.r_max) continue;
    ++est.feasible_starts;
    if (!best || o.path.r < best->path.r) best = &o;
  }
  if (!best) throw NoPathFound("no feasible control found with r <= " + std::to_string(cfg.r_max));
  est.value = best->path.r;
  est.witness = best->path;
  est.endpoint_error = (model.endpoint(est.witness, x, cfg.integrator) - y).norm();
  return est;
}

/// Upper estimate of d(x, y).
inline DistanceEstimate cc_distance_upper(const CommutatorBasis & basis, const Point & x, const Point & y,
                                          const DistanceConfig & cfg = {}, std::uint64_t seed = 0)
{
  return control_distance_upper(ControlModel::horizontal(basis), x, y, cfg, seed);
}

/// Upper estimate of rho(x, y).
inline DistanceEstimate rho_distance_upper(const CommutatorBasis & basis, const Point & x, const Point & y,
                                           const DistanceConfig & cfg = {}, std::uint64_t seed = 0)
{
  return control_distance_upper(ControlModel::extended(basis), x, y, cfg, seed);
}

/// An m-control for d read as a q-control for rho (b_j = u_j on the generators, 0 elsewhere).
inline ControlPath embed_horizontal(const CommutatorBasis & basis, const ControlPath & u)
{
  const int m = basis.num_generators(), q = basis.size();
  if (u.width != m) throw InputError("embed_horizontal: expected a control over the generators");
  ControlPath out{u.r, q, std::vector<double>(static_cast<std::size_t>(u.segments() * q), 0.0), u.durations};
  if (out.durations.empty() && u.segments() > 0) out.durations.assign(static_cast<std::size_t>(u.segments()), 1.0 / u.segments());
  for (int k = 0; k < u.segments(); ++k) {
    for (int j = 0; j < m; ++j) out.b[static_cast<std::size_t>(k * q + j)] = u.control(k, j);
  }
  return out;
}

/**
 * @brief Runs @p a then @p b as one control at scale a.r + b.r.
 *
 * Segment durations shrink in proportion to each part's share of the total scale.
 */
inline ControlPath concatenate(const ControlModel & model, const ControlPath & a, const ControlPath & b)
{
  if (a.width != b.width) throw InputError("concatenate: width mismatch");
  const double R = a.r + b.r;
  ControlPath out{R, a.width, {}, {}};
  if (R == 0.0) return out;
  for (const ControlPath * part : {&a, &b}) {
    for (int k = 0; k < part->segments(); ++k) {
      out.durations.push_back(part->duration(k) * part->r / R);
      for (int j = 0; j < a.width; ++j) {
        // c' = c R / r_part keeps the trajectory; b' = b (r_part / R)^{e - 1}
        out.b.push_back(part->control(k, j) * std::pow(part->r / R, model.exponent(j) - 1));
      }
    }
  }
  return out;
}

struct BoxDistance
{
  double value{0.0};
  MultiIndex I;
  Point h;
  /// Smallest accepted scale.
  double r{0.0};
};

/**
 * @brief Ball-box proxy for d(x, y).
 *
 * Finds the smallest r on a dyadic grid below r0, refined by bisection, at which
 * E_inverse(select_maximal(x, C_hat r), x, y, r) converges with ||h||_I <= eps_hat C_hat r, and
 * returns ||h||_I / (eps_hat C_hat). Throws OutOfRange if even r0 fails.
 */
inline BoxDistance box_distance(const CommutatorBasis & basis, const Point & x, const Point & y, const BallBoxConstants & c,
                                const IntegratorConfig & cfg = {}, int max_levels = 40, int bisections = 12)
{
  c.validate();
  BoxDistance out;
  if ((x - y).norm() == 0.0) {
    out.I = select_maximal(basis, x, c.C_hat * c.r0);
    out.h = Point::Zero(x.size());
    return out;
  }
  const DeterminantTable table(basis, x);
  std::vector<std::pair<MultiIndex, std::optional<Point>>> cache;
  auto attempt = [&](double r) -> std::optional<BoxDistance> {
    const MultiIndex I = table.argmax(c.C_hat * r).K;
    std::optional<Point> * h = nullptr;
    for (auto & e : cache) {
      if (e.first == I) h = &e.second;
    }
    if (!h) {
      std::optional<Point> sol;
      try {
        sol = E_inverse(basis, I, x, y, r, cfg);
      } catch (const NumericalError &) {
      }
      cache.emplace_back(I, sol);
      h = &cache.back().second;
    }
    if (!*h) return std::nullopt;
    const double nh = box_norm(basis, I, **h);
    if (nh > c.eps_hat * c.C_hat * r) return std::nullopt;
    return BoxDistance{nh / (c.eps_hat * c.C_hat), I, **h, r};
  };
  std::optional<BoxDistance> good = attempt(c.r0);
  if (!good) throw OutOfRange("box_distance: no scale up to r0 succeeds");
  double bad = 0.0;
  for (int k = 1; k <= max_levels; ++k) {
    const double r = c.r0 * std::ldexp(1.0, -k);
    auto a = attempt(r);
    if (!a) {
      bad = r;
      break;
    }
    good = std::move(a);
  }
  if (bad > 0.0) {
    for (int it = 0; it < bisections; ++it) {
      const double mid = 0.5 * (bad + good->r);
      auto a = attempt(mid);
      if (a) good = std::move(a);
      else bad = mid;
    }
  }
  return *good;
}

/// box_distance(x, y) < r, decided at the single scale r.
inline bool box_distance_below(const CommutatorBasis & basis, const Point & x, const Point & y, double r,
                               const BallBoxConstants & c, const IntegratorConfig & cfg = {})
{
  const MultiIndex I = select_maximal(basis, x, c.C_hat * r);
  try {
    const Point h = E_inverse(basis, I, x, y, r, cfg);
    return box_norm(basis, I, h) < c.eps_hat * c.C_hat * r;
  } catch (const NumericalError &) {
    return false;
  }
}

/// Box around x containing E_{I,x}(Q_I(eps_hat C_hat r)), doubled about x.
inline std::pair<Point, Point> ball_bounding_box(const CommutatorBasis & basis, const Point & x, double r,
                                                 const BallBoxConstants & c, const IntegratorConfig & cfg = {},
                                                 std::uint64_t seed = 0)
{
  const MultiIndex I = select_maximal(basis, x, c.C_hat * r);
  const double R = c.eps_hat * c.C_hat * r;
  const Point w = box_weights(basis, I, R);
  const int n = x.size();
  Point lo = x, hi = x;
  auto include = [&](const Point & h) {
    const Point e = E_map(basis, I, x, h, cfg);
    lo = lo.cwiseMin(e);
    hi = hi.cwiseMax(e);
  };
  for (int mask = 0; mask < (1 << n); ++mask) {
    Point h(n);
    for (int j = 0; j < n; ++j) h[j] = (mask >> j & 1) ? w[j] : -w[j];
    include(h);
  }
  for (const auto & h : sample_box(basis, I, R, 64, seed)) include(h);
  return {x - 2.0 * (x - lo), x + 2.0 * (hi - x)};
}

/// Leg plan from x to y through the ball-box map at the box-distance solution.
inline PathPlan connect_points(const CommutatorBasis & basis, const Point & x, const Point & y, const BallBoxConstants & c,
                               const IntegratorConfig & cfg = {})
{
  PathPlan plan{x, {}};
  if ((x - y).norm() == 0.0) return plan;
  const BoxDistance bd = box_distance(basis, x, y, c, cfg);
  plan.legs = E_map_legs(basis, bd.I, bd.h);
  return plan;
}

struct HolderScan
{
  double max_ratio{0.0};
  double q50{0.0};
  double q90{0.0};
  double q99{0.0};
  std::vector<double> ratios;
};

/// d_est(x, y) / |x - y|^{1/kappa} over @p count uniform pairs of @p lo..hi.
inline HolderScan holder_ratio_scan(const CommutatorBasis & basis, const Point & lo, const Point & hi, int kappa,
                                    std::size_t count, std::uint64_t seed, const DistanceConfig & cfg = {})
{
  RandomStream rng(seed, 0x401d);
  std::vector<std::pair<Point, Point>> pairs;
  for (std::size_t s = 0; s < count; ++s) {
    Point x(lo.size()), y(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
    for (Eigen::Index i = 0; i < lo.size(); ++i) y[i] = rng.uniform(lo[i], hi[i]);
    pairs.emplace_back(x, y);
  }
  DistanceConfig inner = cfg;
  inner.threads = 1;
  const ControlModel model = ControlModel::horizontal(basis);
  HolderScan out;
  out.ratios = parallel_map(count, cfg.threads, [&](std::size_t s) {
    const auto & [x, y] = pairs[s];
    const double d = control_distance_upper(model, x, y, inner, seed + s).value;
    return d / std::pow((x - y).norm(), 1.0 / kappa);
  });
  if (count == 0) return out;
  std::vector<double> sorted = out.ratios;
  std::sort(sorted.begin(), sorted.end());
  auto q = [&](double p) { return sorted[static_cast<std::size_t>(std::floor(p * static_cast<double>(sorted.size() - 1)))]; };
  out.max_ratio = sorted.back();
  out.q50 = q(0.5);
  out.q90 = q(0.9);
  out.q99 = q(0.99);
  return out;
}

}  // namespace carnot
