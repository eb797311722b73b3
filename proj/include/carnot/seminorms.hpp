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
 * @brief L^p norms, the metric fractional seminorm, directional seminorms along flows, the
 * Euclidean Gagliardo seminorm and the Folland-Stein norm.
 *
 * The metric seminorm
 *
 *     [f]^p = int_Omega int_Omega |f(x) - f(y)|^p / (Vol(x, d(x,y)) d(x,y)^{ps}) dy dx
 *
 * is estimated by Monte Carlo stratified over dyadic distance shells
 * [rho_k / 2, rho_k), rho_k = max_d 2^{-k}. For each shell, y is reached through the ball-box map,
 * y = E_{I,x}(h) with h uniform in Q_I(c rho_k), and the change of variables contributes
 * |det dE/dh|.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "carnot/ballbox.hpp"
#include "carnot/errors.hpp"
#include "carnot/expr.hpp"
#include "carnot/flows.hpp"
#include "carnot/metric.hpp"
#include "carnot/parallel.hpp"
#include "carnot/random.hpp"
#include "carnot/vector_field.hpp"

namespace carnot {

/// Axis-aligned box.
struct Domain
{
  Point lo;
  Point hi;

  Domain() = default;
  Domain(Point l, Point h) : lo(std::move(l)), hi(std::move(h)) { validate(); }

  /// [a, b]^n.
  static Domain cube(int n, double a, double b) { return Domain(Point::Constant(n, a), Point::Constant(n, b)); }

  void validate() const
  {
    if (lo.size() != hi.size() || lo.size() < 1) throw DimensionError("domain bounds have mismatched dimensions");
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
      if (!(lo[i] < hi[i])) throw InputError("domain requires lo < hi in every coordinate");
    }
  }

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const { return (hi - lo).prod(); }
  double diameter() const { return (hi - lo).norm(); }

  bool contains(const Point & x) const
  {
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    }
    return true;
  }

  bool contains(const Domain & other) const { return contains(other.lo) && contains(other.hi); }

  Point sample(RandomStream & rng) const
  {
    Point x(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
    return x;
  }
};

// ---------------------------------------------------------------------------------------------
// L^p and Folland-Stein
// ---------------------------------------------------------------------------------------------

struct LpConfig
{
  /// Midpoint nodes per coordinate.
  int grid{32};
  bool monte_carlo{false};
  std::size_t samples{100000};
  std::uint64_t seed{0};
};

/// (int_Omega |f|^p)^{1/p}.
inline double lp_norm(const Expr & f, const Domain & omega, double p, const LpConfig & cfg = {})
{
  if (!(p >= 1)) throw InputError("lp_norm: p must be >= 1");
  const int n = omega.dim();
  if (f.max_variable() >= n) throw DimensionError("lp_norm: function uses a variable beyond the domain dimension");
  const Program prog(f);
  double sum = 0.0;
  std::size_t count = 0;
  auto add = [&](const Point & x) {
    const double v = prog(x.data());
    if (!std::isfinite(v)) throw DomainError("lp_norm: non-finite integrand");
    sum += std::pow(std::abs(v), p);
    ++count;
  };
  if (cfg.monte_carlo) {
    RandomStream rng(cfg.seed, 0x1b);
    for (std::size_t s = 0; s < cfg.samples; ++s) add(omega.sample(rng));
  } else {
    if (cfg.grid < 1) throw InputError("lp_norm: grid must be positive");
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    Point x(n);
    for (;;) {
      for (int i = 0; i < n; ++i) {
        x[i] = omega.lo[i] + (idx[static_cast<std::size_t>(i)] + 0.5) * (omega.hi[i] - omega.lo[i]) / cfg.grid;
      }
      add(x);
      int i = 0;
      while (i < n && ++idx[static_cast<std::size_t>(i)] == cfg.grid) idx[static_cast<std::size_t>(i++)] = 0;
      if (i == n) break;
    }
  }
  return std::pow(omega.volume() * sum / static_cast<double>(count), 1.0 / p);
}

/// sum_j ||X_j f||_p + ||f||_p.
inline double folland_stein_rhs(const Expr & f, const std::vector<VectorField> & generators, const Domain & omega, double p,
                                const LpConfig & cfg = {})
{
  double s = lp_norm(f, omega, p, cfg);
  for (const auto & X : generators) s += lp_norm(X.apply(f), omega, p, cfg);
  return s;
}

// ---------------------------------------------------------------------------------------------
// Metric seminorm
// ---------------------------------------------------------------------------------------------

/// Distance used for shell membership and the kernel.
class DistanceModel
{
public:
  virtual ~DistanceModel() = default;
  /// Shell k samples h in Q_I(region_factor() rho_k).
  virtual double region_factor() const = 0;
  /// d(x, y) for y = E_{I,x}(h); nullopt when the estimate fails.
  virtual std::optional<double> distance(const Point & x, const MultiIndex & I, const Point & h, const Point & y,
                                         std::uint64_t seed) const = 0;
};

/// d = ||h||_I / (eps_hat C_hat).
class BoxDistanceModel : public DistanceModel
{
public:
  BoxDistanceModel(const CommutatorBasis & basis, BallBoxConstants c) : basis_(basis), c_(c) { c_.validate(); }

  double region_factor() const override { return c_.eps_hat * c_.C_hat; }

  std::optional<double> distance(const Point &, const MultiIndex & I, const Point & h, const Point &,
                                 std::uint64_t) const override
  {
    return box_norm(basis_, I, h) / (c_.eps_hat * c_.C_hat);
  }

private:
  const CommutatorBasis & basis_;
  BallBoxConstants c_;
};

/// d = cc_distance_upper(x, y).
class EstimatorDistanceModel : public DistanceModel
{
public:
  EstimatorDistanceModel(const CommutatorBasis & basis, DistanceConfig cfg, double shell_box_factor = 1.0)
      : model_(ControlModel::horizontal(basis)), cfg_(std::move(cfg)), factor_(shell_box_factor)
  {
    cfg_.threads = 1;
  }

  double region_factor() const override { return factor_; }

  std::optional<double> distance(const Point & x, const MultiIndex &, const Point &, const Point & y,
                                 std::uint64_t seed) const override
  {
    try {
      return control_distance_upper(model_, x, y, cfg_, seed).value;
    } catch (const Error &) {
      return std::nullopt;
    }
  }

private:
  ControlModel model_;
  DistanceConfig cfg_;
  double factor_;
};

/// Vol(x, r); empty means volume_proxy.
using VolumeModel = std::function<double(const Point &, double)>;

struct SeminormConfig
{
  std::size_t pairs{10000};
  /// Shells k = 0..k_max-1.
  int k_max{12};
  /// Outer shell radius; 0 means r0 of the constants.
  double max_d{0.0};
  std::uint64_t seed{0};
  int threads{1};
  /// Attempts per accepted sample before the stratum gives up on a failing draw.
  int max_resample{20};
  /// Uniform pairs used to estimate the mass beyond max_d; 0 disables.
  std::size_t far_pairs{0};
  double det_fd_step{1e-5};
  IntegratorConfig integrator{0.25, 1e-11, 1 << 16};
};

struct PairSample
{
  Point x;
  Point y;
  double d{0.0};
  /// |Omega| |Q| |det dE/dh| / Vol(x, d); zero when the draw misses the shell or Omega.
  double base{0.0};
};

struct PairSampleSet
{
  int strata{0};
  double max_d{0.0};
  double omega_volume{0.0};
  std::vector<std::size_t> per_stratum;
  /// Stratum-major.
  std::vector<PairSample> samples;
  std::size_t failures{0};
  /// max over shells of Vol(x, rho) / Vol(x, rho / 2), used by the truncation bound.
  double doubling{1.0};
};

/**
 * @brief Draws the shell-stratified pairs (x, y) with their change-of-variables weights.
 *
 * The weights do not depend on f, s or p, so one set serves any number of seminorm evaluations;
 * invariances such as [f + c] = [f] then hold exactly.
 */
inline PairSampleSet sample_pairs(const CommutatorBasis & basis, const Domain & omega, const BallBoxConstants & c,
                                  const DistanceModel & model, const SeminormConfig & cfg, const VolumeModel & volume = {})
{
  omega.validate();
  if (omega.dim() != basis.dim()) throw DimensionError("sample_pairs: domain dimension mismatch");
  if (cfg.k_max < 1 || cfg.pairs < static_cast<std::size_t>(cfg.k_max)) throw InputError("sample_pairs: need at least one pair per shell");
  c.validate();
  PairSampleSet set;
  set.strata = cfg.k_max;
  set.max_d = cfg.max_d > 0 ? cfg.max_d : c.r0;
  const std::size_t per = cfg.pairs / static_cast<std::size_t>(cfg.k_max);
  set.per_stratum.assign(static_cast<std::size_t>(cfg.k_max), per);
  const double vol_omega = omega.volume();
  set.omega_volume = vol_omega;
  const double factor = model.region_factor();
  RandomStream root(cfg.seed, 0x5e31);

  struct StratumOut
  {
    std::vector<PairSample> samples;
    std::size_t failures{0};
    double doubling{1.0};
  };
  auto run = [&](std::size_t k) {
    StratumOut out;
    RandomStream rng = root.split(k);
    const double rho = set.max_d * std::ldexp(1.0, -static_cast<int>(k));
    for (std::size_t s = 0; s < per; ++s) {
      PairSample ps;
      for (int attempt = 0;; ++attempt) {
        if (attempt > cfg.max_resample) throw NumericalError("sample_pairs: too many failed draws in one shell");
        ps = PairSample{omega.sample(rng), Point(), 0.0, 0.0};
        const DeterminantTable table(basis, ps.x);
        const MultiIndex I = table.argmax(c.C_hat * rho).K;
        const Point w = box_weights(basis, I, factor * rho);
        Point h(w.size());
        for (Eigen::Index j = 0; j < w.size(); ++j) h[j] = rng.uniform(-w[j], w[j]);
        const std::uint64_t pair_seed = rng();
        try {
          ps.y = E_map(basis, I, ps.x, h, cfg.integrator);
        } catch (const NumericalError &) {
          ++out.failures;
          continue;
        }
        if (!omega.contains(ps.y)) break;
        const auto d = model.distance(ps.x, I, h, ps.y, pair_seed);
        if (!d) {
          ++out.failures;
          continue;
        }
        ps.d = *d;
        if (!(ps.d >= 0.5 * rho && ps.d < rho)) break;
        double det;
        try {
          det = E_jacobian_det(basis, I, ps.x, h, factor * rho, cfg.integrator, cfg.det_fd_step);
        } catch (const NumericalError &) {
          ++out.failures;
          continue;
        }
        const double vol = volume ? volume(ps.x, ps.d) : table.max_value(ps.d);
        if (!(vol > 0)) throw NumericalError("sample_pairs: non-positive ball volume");
        if (!volume) out.doubling = std::max(out.doubling, table.max_value(rho) / table.max_value(0.5 * rho));
        ps.base = vol_omega * box_volume(basis, I, factor * rho) * std::abs(det) / vol;
        break;
      }
      out.samples.push_back(std::move(ps));
    }
    return out;
  };
  for (auto & o : parallel_map(static_cast<std::size_t>(cfg.k_max), cfg.threads, run)) {
    set.failures += o.failures;
    set.doubling = std::max(set.doubling, o.doubling);
    for (auto & s : o.samples) set.samples.push_back(std::move(s));
  }
  return set;
}

struct StratumStats
{
  int stratum{0};
  std::size_t pairs{0};
  double mean_kernel{0.0};
  double stderr_{0.0};
};

struct SeminormResult
{
  double value{0.0};
  /// Standard error of value (delta method from the stratified variance of value^p).
  double stderr_{0.0};
  /// Estimate of value^p.
  double integral{0.0};
  std::vector<StratumStats> strata;
  std::size_t failures{0};
  /// Bound on the mass below the innermost shell with |f(x) - f(y)| <= L d, L the largest ratio seen there.
  double truncated_mass_bound{0.0};
  /// Estimated mass beyond max_d (if requested), and how many far pairs had no distance.
  double far_mass{0.0};
  std::size_t far_unresolved{0};
};

/// Evaluates the seminorm of @p f with exponents (s, p) on a drawn pair set.
inline SeminormResult seminorm_from_samples(const PairSampleSet & set, const Expr & f, double s, double p)
{
  if (!(s > 0 && s < 1)) throw InputError("seminorm: s must lie in (0,1)");
  if (!(p >= 1)) throw InputError("seminorm: p must be >= 1");
  const Program prog(f);
  SeminormResult r;
  r.failures = set.failures;
  double var = 0.0, lip = 0.0;
  std::size_t offset = 0;
  for (int k = 0; k < set.strata; ++k) {
    const std::size_t N = set.per_stratum[static_cast<std::size_t>(k)];
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const PairSample & ps = set.samples[offset + i];
      if (ps.base == 0.0) continue;
      const double df = std::abs(prog(ps.y.data()) - prog(ps.x.data()));
      const double v = ps.base * std::pow(df, p) / std::pow(ps.d, p * s);
      if (!std::isfinite(v)) throw NumericalError("seminorm: non-finite kernel value");
      sum += v;
      sum2 += v * v;
      if (k == set.strata - 1) lip = std::max(lip, df / ps.d);
    }
    offset += N;
    const double mean = sum / static_cast<double>(N);
    const double vk = N > 1 ? std::max(0.0, (sum2 - N * mean * mean) / static_cast<double>(N - 1)) / static_cast<double>(N) : 0.0;
    r.strata.push_back({k, N, mean, std::sqrt(vk)});
    r.integral += mean;
    var += vk;
  }
  r.value = std::pow(r.integral, 1.0 / p);
  r.stderr_ = r.integral > 0 ? std::sqrt(var) / (p * std::pow(r.integral, 1.0 - 1.0 / p)) : 0.0;
  // shells j >= k_max: |Omega| L^p rho_j^{p(1-s)} 2^{ps} doubling, summed geometrically
  const double delta = set.max_d * std::ldexp(1.0, -set.strata);
  const double q = std::pow(2.0, -p * (1.0 - s));
  r.truncated_mass_bound = set.omega_volume * std::pow(lip, p) * std::pow(delta, p * (1.0 - s)) * std::pow(2.0, p * s) * set.doubling / (1.0 - q);
  return r;
}

/**
 * @brief Mass of the seminorm integrand over pairs with d >= max_d, by uniform pairs.
 *
 * Far distances come from box_distance with r0 raised to 8 max_d; pairs it cannot resolve are
 * counted and left out.
 */
inline std::pair<double, std::size_t> far_pair_mass(const CommutatorBasis & basis, const Domain & omega, const Expr & f,
                                                    double s, double p, const BallBoxConstants & c, double max_d,
                                                    std::size_t count, std::uint64_t seed, const VolumeModel & volume = {})
{
  if (count == 0) return {0.0, 0};
  BallBoxConstants far = c;
  far.r0 = 8.0 * max_d;
  const Program prog(f);
  RandomStream rng(seed, 0xfa5);
  double sum = 0.0;
  std::size_t unresolved = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const Point x = omega.sample(rng), y = omega.sample(rng);
    double d;
    try {
      d = box_distance(basis, x, y, far).value;
    } catch (const Error &) {
      ++unresolved;
      continue;
    }
    if (d < max_d) continue;
    const double vol = volume ? volume(x, d) : volume_proxy(basis, x, d);
    sum += std::pow(std::abs(prog(y.data()) - prog(x.data())), p) / (vol * std::pow(d, p * s));
  }
  const double v = omega.volume();
  return {v * v * sum / static_cast<double>(count), unresolved};
}

/// [f]_{W^{s,p}_d(Omega)} restricted to d < max_d.
inline SeminormResult seminorm_d(const Expr & f, const CommutatorBasis & basis, const Domain & omega, double s, double p,
                                 const BallBoxConstants & c, const DistanceModel & model, const SeminormConfig & cfg,
                                 const VolumeModel & volume = {})
{
  const PairSampleSet set = sample_pairs(basis, omega, c, model, cfg, volume);
  SeminormResult r = seminorm_from_samples(set, f, s, p);
  if (cfg.far_pairs > 0) {
    std::tie(r.far_mass, r.far_unresolved) = far_pair_mass(basis, omega, f, s, p, c, set.max_d, cfg.far_pairs, cfg.seed, volume);
  }
  return r;
}

// ---------------------------------------------------------------------------------------------
// Directional seminorm
// ---------------------------------------------------------------------------------------------

struct DirectionalConfig
{
  std::size_t x_samples{4096};
  /// Dyadic t-levels (r0 2^{-j-1}, r0 2^{-j}], j = 0..t_levels-1.
  int t_levels{24};
  /// Gauss-Legendre nodes per level (1..8).
  int t_nodes{4};
  bool symmetric_t{false};
  /// Drop t with e^{tZ}(x) outside Omega.
  bool restrict_to_domain{true};
  /// Adds |Zf(x)|^p delta^{p(1-eps)} / (p(1-eps)) for t below the smallest level.
  bool tail_correction{true};
  std::uint64_t seed{0};
  int threads{1};
  IntegratorConfig integrator{};
};

namespace detail {

inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int m)
{
  if (m < 1 || m > 8) throw InputError("Gauss-Legendre order must be 1..8");
  std::vector<double> x(static_cast<std::size_t>(m)), w(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

}  // namespace detail

struct DirectionalResult
{
  double value{0.0};
  double stderr_{0.0};
  /// Fraction of (x, t) nodes dropped because the flow left Omega.
  double exit_fraction{0.0};
};

/**
 * @brief [f]_{W^{eps,p}_Z(Omega)} = (int_Omega int_0^{r0} |f(e^{tZ}x) - f(x)|^p / t^{1+eps p} dt dx)^{1/p}.
 */
inline DirectionalResult seminorm_dir(const Expr & f, const VectorField & Z, const Domain & omega, double eps, double p,
                                      double r0, const DirectionalConfig & cfg = {})
{
  if (!(eps > 0 && eps < 1)) throw InputError("seminorm_dir: eps must lie in (0,1)");
  if (!(p >= 1)) throw InputError("seminorm_dir: p must be >= 1");
  if (!(r0 > 0)) throw InputError("seminorm_dir: r0 must be positive");
  if (Z.dim() != omega.dim()) throw DimensionError("seminorm_dir: dimension mismatch");
  const Program prog(f);
  const Program zf(Z.apply(f));
  const auto [gx, gw] = detail::gauss_legendre(cfg.t_nodes);
  // nodes in increasing t with weights already divided by t^{1+eps p}
  std::vector<double> ts, ws;
  for (int j = cfg.t_levels - 1; j >= 0; --j) {
    const double a = r0 * std::ldexp(1.0, -j - 1), b = r0 * std::ldexp(1.0, -j);
    for (int i = cfg.t_nodes - 1; i >= 0; --i) {
      const double t = 0.5 * (a + b) + 0.5 * (b - a) * gx[static_cast<std::size_t>(i)];
      ts.push_back(t);
      ws.push_back(0.5 * (b - a) * gw[static_cast<std::size_t>(i)] / std::pow(t, 1.0 + eps * p));
    }
  }
  const double delta = r0 * std::ldexp(1.0, -cfg.t_levels);
  const double tail = std::pow(delta, p * (1.0 - eps)) / (p * (1.0 - eps));
  struct Acc
  {
    double v{0.0};
    std::size_t dropped{0}, nodes{0};
  };
  RandomStream root(cfg.seed, 0xd1);
  auto one = [&](std::size_t i) {
    RandomStream rng = root.split(i);
    const Point x = omega.sample(rng);
    const double fx = prog(x.data());
    Acc acc;
    for (double sign : {1.0, -1.0}) {
      if (sign < 0 && !cfg.symmetric_t) break;
      Point y = x;
      double t_prev = 0.0;
      bool exited = false;
      for (std::size_t k = 0; k < ts.size(); ++k) {
        y = flow(Z, y, sign * (ts[k] - t_prev), cfg.integrator);
        t_prev = ts[k];
        ++acc.nodes;
        if (cfg.restrict_to_domain && (exited || !omega.contains(y))) {
          exited = true;
          ++acc.dropped;
          continue;
        }
        acc.v += ws[k] * std::pow(std::abs(prog(y.data()) - fx), p);
      }
      if (cfg.tail_correction) acc.v += std::pow(std::abs(zf(x.data())), p) * tail;
    }
    return acc;
  };
  const auto parts = parallel_map(cfg.x_samples, cfg.threads, one);
  double sum = 0.0, sum2 = 0.0;
  std::size_t dropped = 0, nodes = 0;
  for (const auto & a : parts) {
    sum += a.v;
    sum2 += a.v * a.v;
    dropped += a.dropped;
    nodes += a.nodes;
  }
  const double N = static_cast<double>(cfg.x_samples);
  const double vol = omega.volume();
  const double mean = sum / N;
  const double integral = vol * mean;
  DirectionalResult r;
  r.value = std::pow(integral, 1.0 / p);
  const double var = N > 1 ? std::max(0.0, (sum2 - N * mean * mean) / (N - 1)) / N : 0.0;
  r.stderr_ = integral > 0 ? vol * std::sqrt(var) / (p * std::pow(integral, 1.0 - 1.0 / p)) : 0.0;
  r.exit_fraction = nodes ? static_cast<double>(dropped) / static_cast<double>(nodes) : 0.0;
  return r;
}

// ---------------------------------------------------------------------------------------------
// Classical Gagliardo seminorm
// ---------------------------------------------------------------------------------------------

struct GagliardoConfig
{
  std::size_t pairs{40000};
  int k_max{16};
  std::uint64_t seed{0};
};

/**
 * @brief (int int_{Omega x Omega} |f(x) - f(y)|^p / |x - y|^{n + p sigma})^{1/p} by Euclidean shell
 * Monte Carlo: shell k draws y - x uniformly in the cube of half-side rho_k, rho_k = diam 2^{-k}.
 */
inline SeminormResult classical_gagliardo(const Expr & f, const Domain & omega, double sigma, double p,
                                          const GagliardoConfig & cfg = {})
{
  if (!(sigma > 0 && sigma < 1)) throw InputError("classical_gagliardo: sigma must lie in (0,1)");
  if (!(p >= 1)) throw InputError("classical_gagliardo: p must be >= 1");
  const int n = omega.dim();
  const Program prog(f);
  const double diam = omega.diameter();
  const std::size_t per = cfg.pairs / static_cast<std::size_t>(cfg.k_max);
  RandomStream root(cfg.seed, 0x9a9);
  SeminormResult r;
  double var = 0.0;
  for (int k = 0; k < cfg.k_max; ++k) {
    RandomStream rng = root.split(static_cast<std::uint64_t>(k));
    const double rho = diam * std::ldexp(1.0, -k);
    const double weight = omega.volume() * std::pow(2.0 * rho, n);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < per; ++i) {
      const Point x = omega.sample(rng);
      Point y(n);
      for (int j = 0; j < n; ++j) y[j] = x[j] + rng.uniform(-rho, rho);
      const double dist = (y - x).norm();
      if (!omega.contains(y) || !(dist >= 0.5 * rho && dist < rho)) continue;
      const double v = weight * std::pow(std::abs(prog(y.data()) - prog(x.data())), p) / std::pow(dist, n + p * sigma);
      sum += v;
      sum2 += v * v;
    }
    const double N = static_cast<double>(per);
    const double mean = sum / N;
    const double vk = N > 1 ? std::max(0.0, (sum2 - N * mean * mean) / (N - 1)) / N : 0.0;
    r.strata.push_back({k, per, mean, std::sqrt(vk)});
    r.integral += mean;
    var += vk;
  }
  r.value = std::pow(r.integral, 1.0 / p);
  r.stderr_ = r.integral > 0 ? std::sqrt(var) / (p * std::pow(r.integral, 1.0 - 1.0 / p)) : 0.0;
  return r;
}

// ---------------------------------------------------------------------------------------------
// Equivalence
// ---------------------------------------------------------------------------------------------

struct EquivalenceResult
{
  /// ||f||_p(Omega_2) + sum_w [f]_{W^{s/|w|,p}_{X_w}(Omega_2)}.
  double middle{0.0};
  /// ||f||_p + [f]_{W^{s,p}_d} on Omega and on Omega_3.
  double inner{0.0};
  double outer{0.0};
  double lower_ratio{0.0};
  double upper_ratio{0.0};
};

inline EquivalenceResult equivalence_sides(const Expr & f, const CommutatorBasis & basis, const Domain & omega,
                                           const Domain & omega2, const Domain & omega3, double s, double p,
                                           const BallBoxConstants & c, const DistanceModel & model,
                                           const SeminormConfig & scfg, const DirectionalConfig & dcfg,
                                           const LpConfig & lcfg = {})
{
  if (!omega2.contains(omega) || !omega3.contains(omega2)) throw InputError("equivalence_sides: domains must be nested");
  EquivalenceResult r;
  r.middle = lp_norm(f, omega2, p, lcfg);
  for (const auto & e : basis.entries()) {
    r.middle += seminorm_dir(f, e.field, omega2, s / e.word.length(), p, c.r0, dcfg).value;
  }
  r.inner = lp_norm(f, omega, p, lcfg) + seminorm_d(f, basis, omega, s, p, c, model, scfg).value;
  r.outer = lp_norm(f, omega3, p, lcfg) + seminorm_d(f, basis, omega3, s, p, c, model, scfg).value;
  r.lower_ratio = r.middle > 0 ? r.inner / r.middle : 0.0;
  r.upper_ratio = r.outer > 0 ? r.middle / r.outer : 0.0;
  return r;
}

}  // namespace carnot
