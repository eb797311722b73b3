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
 * @brief Numerical property suites. Each returns a Report whose pass flag is judged against the
 * Thresholds passed in, and which records those thresholds.
 *
 * "Stable" means (max - min) / min < threshold over a sequence of sample-count doublings.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "carnot/ballbox.hpp"
#include "carnot/errors.hpp"
#include "carnot/flows.hpp"
#include "carnot/metric.hpp"
#include "carnot/report.hpp"
#include "carnot/seminorms.hpp"
#include "carnot/vector_field.hpp"

namespace carnot {

/// Everything a suite needs from a scenario.
struct Context
{
  CommutatorBasis basis;
  Expr f;
  Domain omega;
  Domain omega0;
  std::optional<Domain> omega2;
  std::optional<Domain> omega3;
  BallBoxConstants constants;
  IntegratorConfig integrator;
  DistanceConfig distance;
  SeminormConfig seminorm;
  DirectionalConfig directional;
  LpConfig lp;
  std::uint64_t seed{0};
  int threads{1};
};

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double> & x, const std::vector<double> & y)
{
  if (x.size() != y.size() || x.size() < 2) throw InputError("loglog_slope: need at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

/// (max - min) / min, 0 when all values are zero, infinity when only the minimum is.
inline double relative_spread(const std::vector<double> & v)
{
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*hi == 0.0) return 0.0;
  if (*lo <= 0.0) return std::numeric_limits<double>::infinity();
  return (*hi - *lo) / *lo;
}

inline std::vector<Point> sample_points(const Domain & d, std::size_t count, std::uint64_t seed, std::uint64_t stream)
{
  RandomStream rng(seed, stream);
  std::vector<Point> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(d.sample(rng));
  return out;
}

namespace detail {

inline std::string fmt_param(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Integrator for reference flows, two orders tighter than the one under test.
inline IntegratorConfig reference_integrator(const IntegratorConfig & c)
{
  IntegratorConfig r = c;
  r.tol = c.tol * 1e-2;
  r.h0 = std::min(c.h0, 0.02);
  r.max_substeps = std::max(c.max_substeps, 1 << 20);
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------

struct IdentityParams
{
  Word word{std::vector<int>{1, 2}};
  std::vector<double> s_grid{0.05, 0.1, 0.25, 0.5};
  std::vector<Point> points;
};

/**
 * @brief max over s, x of |exp_ap(s^l X_w)(x) - e^{s^l X_w}(x)|.
 *
 * Threshold "heisenberg.error_factor": pass iff the max error is at most factor * integrator tol.
 */
inline Report verify_heisenberg_identity(const Context & ctx, const IdentityParams & prm, const Thresholds & th)
{
  Report rep("heisenberg");
  const auto & gens = ctx.basis.generators();
  const VectorField Xw = commutator_field(gens, prm.word);
  const IntegratorConfig ref = detail::reference_integrator(ctx.integrator);
  double max_err = 0.0;
  for (double s : prm.s_grid) {
    const double t = std::pow(s, prm.word.length());
    double err_s = 0.0;
    for (const auto & x : prm.points) {
      const Point a = approx_exp(gens, prm.word, t, x, ctx.integrator);
      const Point b = flow(Xw, x, t, ref);
      err_s = std::max(err_s, (a - b).norm());
    }
    rep.set("error.s=" + detail::fmt_param(s), err_s);
    max_err = std::max(max_err, err_s);
  }
  rep.set("max_error", max_err);
  rep.set("integrator_tol", ctx.integrator.tol);
  rep.set_passed(max_err <= rep.threshold(th, "heisenberg.error_factor") * ctx.integrator.tol);
  rep.metadata()["word"] = prm.word.to_string();
  rep.metadata()["points"] = prm.points.size();
  return rep;
}

// ---------------------------------------------------------------------------------------------

struct BracketOrderParams
{
  std::vector<Word> words;
  std::vector<double> tau_grid{0.2, 0.1, 0.05, 0.025, 0.0125};
  std::vector<Point> points;
};

/// Fitted order of e(tau) = max_x |C_tau(x) - x - tau^l X_w(x)|, or nullopt when e is at the noise floor.
struct OrderFit
{
  std::optional<double> order;
  double max_error{0.0};
  std::vector<double> errors;
};

inline OrderFit bracket_order(const CommutatorBasis & basis, const Word & w, const std::vector<double> & taus,
                              const std::vector<Point> & points, const IntegratorConfig & cfg, double floor)
{
  const auto & gens = basis.generators();
  const VectorField Xw = commutator_field(gens, w);
  OrderFit fit;
  std::vector<double> tx, ey;
  for (double tau : taus) {
    double e = 0.0;
    for (const auto & x : points) {
      const Point c = replay(gens, approx_exp_legs(w, std::pow(tau, w.length())), x, cfg);
      e = std::max(e, (c - x - std::pow(tau, w.length()) * Xw.eval(x)).norm());
    }
    fit.errors.push_back(e);
    fit.max_error = std::max(fit.max_error, e);
    if (e > floor) {
      tx.push_back(tau);
      ey.push_back(e);
    }
  }
  if (tx.size() >= 2) fit.order = loglog_slope(tx, ey);
  return fit;
}

/**
 * @brief Flow commutators against symbolic brackets.
 *
 * Thresholds "bracket.min_order" and "bracket.noise_factor": a word passes when its error stays
 * below noise_factor * tol (1 + |x|) on the whole grid (the identity is exact), or its fitted
 * order is at least min_order.
 */
inline Report verify_bracket_order(const Context & ctx, const BracketOrderParams & prm, const Thresholds & th)
{
  Report rep("bracket");
  const double min_order = rep.threshold(th, "bracket.min_order");
  double xmax = 0.0;
  for (const auto & x : prm.points) xmax = std::max(xmax, x.norm());
  const double floor = rep.threshold(th, "bracket.noise_factor") * ctx.integrator.tol * (1.0 + xmax);
  bool pass = true;
  for (const auto & w : prm.words) {
    const OrderFit fit = bracket_order(ctx.basis, w, prm.tau_grid, prm.points, ctx.integrator, floor);
    const std::string key = w.to_string();
    rep.set(key + ".max_error", fit.max_error);
    rep.set(key + ".exact", fit.order ? 0.0 : 1.0);
    rep.set(key + ".order", fit.order ? *fit.order : std::numeric_limits<double>::quiet_NaN());
    if (fit.order && *fit.order < min_order) pass = false;
  }
  rep.set("noise_floor", floor);
  rep.set_passed(pass);
  return rep;
}

// ---------------------------------------------------------------------------------------------

struct ConvergenceParams
{
  std::vector<Word> words;
  std::vector<double> t_grid{0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125};
  Point point;
};

/**
 * @brief Log-log slope of |exp_ap(t X_w)(x) - e^{t X_w}(x)| over t.
 *
 * Thresholds "convergence.exact_factor" (errors below factor * tol count as exact, required for
 * |w| = 1) and "convergence.slope_slack" (otherwise slope >= (l + 1) / l - slack).
 */
inline Report verify_convergence(const Context & ctx, const ConvergenceParams & prm, const Thresholds & th)
{
  Report rep("convergence");
  const double exact = rep.threshold(th, "convergence.exact_factor") * ctx.integrator.tol;
  const double slack = rep.threshold(th, "convergence.slope_slack");
  const IntegratorConfig ref = detail::reference_integrator(ctx.integrator);
  const auto & gens = ctx.basis.generators();
  bool pass = true;
  for (const auto & w : prm.words) {
    const VectorField Xw = commutator_field(gens, w);
    std::vector<double> ts, es;
    double max_err = 0.0;
    for (double t : prm.t_grid) {
      const double e = (approx_exp(gens, w, t, prm.point, ctx.integrator) - flow(Xw, prm.point, t, ref)).norm();
      max_err = std::max(max_err, e);
      if (e > exact) {
        ts.push_back(t);
        es.push_back(e);
      }
    }
    const std::string key = w.to_string();
    const double need = (w.length() + 1.0) / w.length() - slack;
    rep.set(key + ".max_error", max_err);
    rep.set(key + ".expected_slope", (w.length() + 1.0) / w.length());
    if (ts.size() < 2) {
      rep.set(key + ".slope", std::numeric_limits<double>::quiet_NaN());
      rep.set(key + ".exact", max_err <= exact ? 1.0 : 0.0);
      if (max_err > exact) pass = false;
    } else {
      const double slope = loglog_slope(ts, es);
      rep.set(key + ".slope", slope);
      rep.set(key + ".exact", 0.0);
      if (w.length() == 1 || slope < need) pass = false;
    }
  }
  rep.set_passed(pass);
  return rep;
}

// ---------------------------------------------------------------------------------------------

struct BallboxParams
{
  std::vector<Point> points;
  std::vector<double> r_grid{0.05, 0.1};
  std::size_t samples{200};
  /// Segments of the random extended-control paths for the inclusion check.
  int path_segments{4};
};

/**
 * @brief Injectivity (round trip), inclusion and Jacobian bounds of E_{I,x} on boxes.
 *
 * For each x and r, I = select_maximal(x, r) and h is sampled in Q_I(eps_hat r). The Jacobian is
 * taken in box-scaled coordinates u (h_j = r^{l_{i_j}} u_j) and divided by |lambda_I| r^{l(I)}.
 * Inclusion sends random extended controls of scale r / inclusion_C from x and requires the
 * recovered h in Q_I(eps_hat r).
 *
 * Thresholds: "ballbox.jacobian_C", "ballbox.inclusion_C", "ballbox.roundtrip".
 */
inline Report verify_ballbox(const Context & ctx, const BallboxParams & prm, const Thresholds & th)
{
  Report rep("ballbox");
  const double Cj = rep.threshold(th, "ballbox.jacobian_C");
  const double Ci = rep.threshold(th, "ballbox.inclusion_C");
  const double rt_tol = rep.threshold(th, "ballbox.roundtrip");
  const auto & basis = ctx.basis;
  const ControlModel ext = ControlModel::extended(basis);
  double ratio_min = std::numeric_limits<double>::infinity(), ratio_max = 0.0, rt = 0.0, incl = 0.0;
  std::size_t rejected = 0, not_maximal = 0, inclusion_failures = 0;
  RandomStream rng(ctx.seed, 0xb0b);
  for (std::size_t xi = 0; xi < prm.points.size(); ++xi) {
    const Point & x = prm.points[xi];
    for (double r : prm.r_grid) {
      const MultiIndex I = select_maximal(basis, x, r);
      const double lam = std::abs(lambda_I(basis, I, x));
      if (lam == 0.0) {
        ++rejected;
        continue;
      }
      if (!is_eta_maximal(basis, I, x, r, ctx.constants.eta)) ++not_maximal;
      const double R = ctx.constants.eps_hat * r;
      for (const auto & h : sample_box(basis, I, R, prm.samples, rng())) {
        const double det = E_jacobian_det(basis, I, x, h, r, ctx.integrator);
        const double ratio = std::abs(det) / lam;
        ratio_min = std::min(ratio_min, ratio);
        ratio_max = std::max(ratio_max, ratio);
        const Point y = E_map(basis, I, x, h, ctx.integrator);
        double e;
        try {
          e = (E_inverse(basis, I, x, y, r, ctx.integrator) - h).lpNorm<Eigen::Infinity>();
        } catch (const NumericalError &) {
          e = std::numeric_limits<double>::infinity();
        }
        rt = std::max(rt, e);
      }
      for (std::size_t s = 0; s < prm.samples; ++s) {
        ControlPath p{r / Ci, ext.width(), {}, {}};
        for (int k = 0; k < prm.path_segments; ++k) {
          for (;;) {
            std::vector<double> b;
            double n2 = 0.0;
            for (int j = 0; j < ext.width(); ++j) {
              b.push_back(rng.uniform(-1.0, 1.0));
              n2 += b.back() * b.back();
            }
            if (n2 <= 1.0) {
              p.b.insert(p.b.end(), b.begin(), b.end());
              break;
            }
          }
        }
        const Point y = ext.endpoint(p, x, ctx.integrator);
        double q;
        try {
          q = box_norm(basis, I, E_inverse(basis, I, x, y, r, ctx.integrator)) / R;
        } catch (const NumericalError &) {
          q = std::numeric_limits<double>::infinity();
        }
        if (!(q < 1.0)) ++inclusion_failures;
        incl = std::max(incl, q);
      }
    }
  }
  const double C_emp = std::max(ratio_max, ratio_min > 0 ? 1.0 / ratio_min : std::numeric_limits<double>::infinity());
  rep.set("jacobian_ratio_min", ratio_min);
  rep.set("jacobian_ratio_max", ratio_max);
  rep.set("jacobian_C", C_emp);
  rep.set("roundtrip_max", rt);
  rep.set("inclusion_max_ratio", incl);
  rep.set("inclusion_C_min", Ci * incl);
  rep.set("inclusion_failures", static_cast<double>(inclusion_failures));
  rep.set("rejected_degenerate", static_cast<double>(rejected));
  rep.set("not_maximal", static_cast<double>(not_maximal));
  rep.set_passed(C_emp <= Cj && rt <= rt_tol && inclusion_failures == 0 && not_maximal == 0);
  return rep;
}

// ---------------------------------------------------------------------------------------------

struct VolumeParams
{
  std::vector<Point> points;
  std::vector<double> r_grid{1e-3, 1e-2, 1e-1};
  std::size_t samples{100000};
  /// "box" (ball-box proxy distance) or "cc" (control estimator).
  std::string estimator{"box"};
};

/// Lebesgue measure of {y : d_est(x, y) < r} with the chosen estimator.
inline VolumeEstimate estimate_ball_volume(const Context & ctx, const Point & x, double r, std::size_t samples,
                                           const std::string & estimator, std::uint64_t seed)
{
  const auto [lo, hi] = ball_bounding_box(ctx.basis, x, r, ctx.constants, ctx.integrator, seed);
  if (estimator == "box") {
    const MultiIndex I = select_maximal(ctx.basis, x, ctx.constants.C_hat * r);
    const double R = ctx.constants.eps_hat * ctx.constants.C_hat * r;
    NewtonConfig newton;
    return ball_volume_mc(lo, hi, [&](const Point & y) {
      try {
        return box_norm(ctx.basis, I, E_inverse(ctx.basis, I, x, y, r, ctx.integrator, newton)) < R;
      } catch (const NumericalError &) {
        return false;
      }
    }, samples, seed);
  }
  if (estimator == "cc") {
    DistanceConfig dc = ctx.distance;
    dc.threads = 1;
    const ControlModel model = ControlModel::horizontal(ctx.basis);
    std::uint64_t k = 0;
    return ball_volume_mc(lo, hi, [&](const Point & y) {
      try {
        return control_distance_upper(model, x, y, dc, seed + ++k).value < r;
      } catch (const NumericalError &) {
        return false;
      }
    }, samples, seed);
  }
  throw InputError("unknown volume estimator '" + estimator + "'");
}

/**
 * @brief Volume exponent: slopes of volume_proxy and of Monte Carlo ball volumes against r.
 *
 * Thresholds "volume.slope_tol" (|slope_mc - slope_proxy|) and "volume.ratio_factor" (MC / proxy
 * within [1/F, F]).
 */
inline Report verify_volume(const Context & ctx, const VolumeParams & prm, const Thresholds & th)
{
  Report rep("volume");
  const double slope_tol = rep.threshold(th, "volume.slope_tol");
  const double F = rep.threshold(th, "volume.ratio_factor");
  bool pass = true;
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0, worst = 0.0;
  rep.strata() = Table{{"point", "r", "proxy", "mc", "mc_stderr"}, {}};
  for (std::size_t i = 0; i < prm.points.size(); ++i) {
    const Point & x = prm.points[i];
    std::vector<double> proxy, mc;
    for (std::size_t k = 0; k < prm.r_grid.size(); ++k) {
      const double r = prm.r_grid[k];
      proxy.push_back(volume_proxy(ctx.basis, x, r));
      const VolumeEstimate v = estimate_ball_volume(ctx, x, r, prm.samples, prm.estimator, ctx.seed + 1000 * i + k);
      mc.push_back(v.value);
      rep.strata().rows.push_back({std::to_string(i), format_double(r), format_double(proxy.back()), format_double(v.value),
                                   format_double(v.stderr_)});
      const double ratio = v.value / proxy.back();
      rmin = std::min(rmin, ratio);
      rmax = std::max(rmax, ratio);
    }
    const double sp = loglog_slope(prm.r_grid, proxy);
    const bool mc_ok = std::all_of(mc.begin(), mc.end(), [](double v) { return v > 0; });
    const double sm = mc_ok ? loglog_slope(prm.r_grid, mc) : std::numeric_limits<double>::quiet_NaN();
    rep.set("point" + std::to_string(i) + ".slope_proxy", sp);
    rep.set("point" + std::to_string(i) + ".slope_mc", sm);
    const double dev = mc_ok ? std::abs(sm - sp) : std::numeric_limits<double>::infinity();
    worst = std::max(worst, dev);
  }
  rep.set("max_slope_deviation", worst);
  rep.set("ratio_min", rmin);
  rep.set("ratio_max", rmax);
  pass = worst <= slope_tol && rmin >= 1.0 / F && rmax <= F;
  rep.set_passed(pass);
  rep.metadata()["estimator"] = prm.estimator;
  rep.metadata()["samples_per_radius"] = prm.samples;
  return rep;
}

// ---------------------------------------------------------------------------------------------

struct HolderParams
{
  std::size_t pairs{1000};
  int segments{8};
  int kappa{2};
};

/// Threshold "holder.refinement_factor": max ratio may change by at most this factor when K doubles.
inline Report verify_holder(const Context & ctx, const HolderParams & prm, const Thresholds & th)
{
  Report rep("holder");
  const double F = rep.threshold(th, "holder.refinement_factor");
  DistanceConfig dc = ctx.distance;
  dc.threads = ctx.threads;
  dc.segments = prm.segments;
  const HolderScan a = holder_ratio_scan(ctx.basis, ctx.omega.lo, ctx.omega.hi, prm.kappa, prm.pairs, ctx.seed, dc);
  dc.segments = 2 * prm.segments;
  const HolderScan b = holder_ratio_scan(ctx.basis, ctx.omega.lo, ctx.omega.hi, prm.kappa, prm.pairs, ctx.seed, dc);
  const double change = std::max(a.max_ratio / b.max_ratio, b.max_ratio / a.max_ratio);
  rep.set("max_ratio.K", a.max_ratio);
  rep.set("max_ratio.2K", b.max_ratio);
  rep.set("q50.K", a.q50);
  rep.set("q90.K", a.q90);
  rep.set("q99.K", a.q99);
  rep.set("q50.2K", b.q50);
  rep.set("refinement_change", change);
  rep.set_passed(std::isfinite(a.max_ratio) && std::isfinite(b.max_ratio) && change <= F);
  rep.metadata()["segments"] = prm.segments;
  rep.metadata()["pairs"] = prm.pairs;
  return rep;
}

// ---------------------------------------------------------------------------------------------

struct AnisotropicParams
{
  std::vector<double> s_list{0.25, 0.5, 0.75};
  std::vector<double> p_list{1.0, 2.0};
  std::size_t base_pairs{10000};
  int doublings{2};
};

/**
 * @brief [f]_{W^{s,p}_d(Omega)} / (sum_j |X_j f|_p + |f|_p on Omega_0) for each (s, p), over pair
 * counts base * 2^k.
 *
 * Threshold "anisotropic.stability".
 */
inline Report verify_anisotropic(const Context & ctx, const AnisotropicParams & prm, const Thresholds & th)
{
  Report rep("anisotropic");
  const double stab = rep.threshold(th, "anisotropic.stability");
  const BoxDistanceModel model(ctx.basis, ctx.constants);
  std::vector<PairSampleSet> sets;
  for (int k = 0; k <= prm.doublings; ++k) {
    SeminormConfig sc = ctx.seminorm;
    sc.pairs = prm.base_pairs << k;
    sc.threads = ctx.threads;
    sc.seed = ctx.seed;
    sets.push_back(sample_pairs(ctx.basis, ctx.omega, ctx.constants, model, sc));
  }
  rep.strata() = Table{{"s", "p", "pairs", "stratum", "pairs_in_stratum", "mean_kernel", "stderr"}, {}};
  bool pass = true;
  for (double p : prm.p_list) {
    const double fs = folland_stein_rhs(ctx.f, ctx.basis.generators(), ctx.omega0, p, ctx.lp);
    rep.set("folland_stein.p=" + detail::fmt_param(p), fs);
    for (double s : prm.s_list) {
      const std::string key = "s=" + detail::fmt_param(s) + ",p=" + detail::fmt_param(p);
      std::vector<double> ratios;
      for (std::size_t k = 0; k < sets.size(); ++k) {
        const SeminormResult r = seminorm_from_samples(sets[k], ctx.f, s, p);
        ratios.push_back(fs > 0 ? r.value / fs : std::numeric_limits<double>::infinity());
        rep.set(key + ".ratio.pairs=" + std::to_string(prm.base_pairs << k), ratios.back());
        if (k + 1 == sets.size()) {
          rep.set(key + ".seminorm", r.value);
          rep.set(key + ".stderr", r.stderr_);
          rep.set(key + ".truncated_mass_bound", r.truncated_mass_bound);
          for (const auto & st : r.strata) {
            rep.strata().rows.push_back({detail::fmt_param(s), detail::fmt_param(p), std::to_string(prm.base_pairs << k),
                                         std::to_string(st.stratum), std::to_string(st.pairs), format_double(st.mean_kernel),
                                         format_double(st.stderr_)});
          }
        }
      }
      const double spread = relative_spread(ratios);
      rep.set(key + ".stability", spread);
      const bool finite = std::all_of(ratios.begin(), ratios.end(), [](double v) { return std::isfinite(v); });
      if (!finite || !(spread < stab)) pass = false;
    }
  }
  std::size_t failures = 0;
  for (const auto & s : sets) failures += s.failures;
  rep.set("resampled_pairs", static_cast<double>(failures));
  rep.set_passed(pass);
  return rep;
}

// ---------------------------------------------------------------------------------------------

struct DirectionalParams
{
  Word word{std::vector<int>{1, 2}};
  double s{0.5};
  double p{2.0};
  std::size_t base_samples{2048};
  int doublings{2};
};

/**
 * @brief [f]_{W^{s/|w|,p}_{X_w}(Omega)} over x-sample doublings and its ratio to the Folland-Stein
 * norm on Omega_0.
 *
 * Threshold "directional.stability".
 */
inline Report verify_directional(const Context & ctx, const DirectionalParams & prm, const Thresholds & th)
{
  Report rep("directional");
  const double stab = rep.threshold(th, "directional.stability");
  const VectorField Xw = commutator_field(ctx.basis.generators(), prm.word);
  const double fs = folland_stein_rhs(ctx.f, ctx.basis.generators(), ctx.omega0, prm.p, ctx.lp);
  const double eps = prm.s / prm.word.length();
  std::vector<double> ratios;
  for (int k = 0; k <= prm.doublings; ++k) {
    DirectionalConfig dc = ctx.directional;
    dc.x_samples = prm.base_samples << k;
    dc.threads = ctx.threads;
    dc.seed = ctx.seed;
    const DirectionalResult r = seminorm_dir(ctx.f, Xw, ctx.omega, eps, prm.p, ctx.constants.r0, dc);
    const std::string tag = ".x_samples=" + std::to_string(dc.x_samples);
    rep.set("seminorm" + tag, r.value);
    rep.set("stderr" + tag, r.stderr_);
    rep.set("exit_fraction" + tag, r.exit_fraction);
    ratios.push_back(fs > 0 ? r.value / fs : std::numeric_limits<double>::infinity());
    rep.set("ratio" + tag, ratios.back());
  }
  const double spread = relative_spread(ratios);
  rep.set("folland_stein", fs);
  rep.set("stability", spread);
  const bool finite = std::all_of(ratios.begin(), ratios.end(), [](double v) { return std::isfinite(v); });
  rep.set_passed(finite && spread < stab);
  rep.metadata()["word"] = prm.word.to_string();
  return rep;
}

// ---------------------------------------------------------------------------------------------

struct SupHolderParams
{
  Word word{std::vector<int>{1, 2}};
  std::size_t x_samples{200};
  /// tau = +-r0 2^{-k/2}, k = 0..tau_levels-1.
  int tau_levels{12};
  /// Grid nodes per axis (endpoints included) for the max over Omega_0.
  int grid{13};
};

struct SupHolderValues
{
  double S{0.0};
  double R{0.0};
};

/// S = max |f(e^{tau X_w}x) - f(x)| / |tau|^{1/|w|}, R = max_{Omega_0} sum_j |X_j f|.
inline SupHolderValues sup_holder_values(const Context & ctx, const SupHolderParams & prm)
{
  const VectorField Xw = commutator_field(ctx.basis.generators(), prm.word);
  const Program f(ctx.f);
  SupHolderValues v;
  const double r0 = ctx.constants.r0;
  for (const auto & x : sample_points(ctx.omega, prm.x_samples, ctx.seed, 0x5c9)) {
    const double fx = f(x.data());
    for (double sign : {1.0, -1.0}) {
      for (int k = 0; k < prm.tau_levels; ++k) {
        const double tau = sign * r0 * std::pow(2.0, -0.5 * k);
        const Point y = flow(Xw, x, tau, ctx.integrator);
        v.S = std::max(v.S, std::abs(f(y.data()) - fx) / std::pow(std::abs(tau), 1.0 / prm.word.length()));
      }
    }
  }
  std::vector<Program> dx;
  for (const auto & X : ctx.basis.generators()) dx.emplace_back(X.apply(ctx.f));
  const int n = ctx.omega0.dim();
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Point x(n);
  for (;;) {
    for (int i = 0; i < n; ++i) {
      x[i] = ctx.omega0.lo[i] + (ctx.omega0.hi[i] - ctx.omega0.lo[i]) * idx[static_cast<std::size_t>(i)] / (prm.grid - 1);
    }
    double s = 0.0;
    for (const auto & d : dx) s += std::abs(d(x.data()));
    v.R = std::max(v.R, s);
    int i = 0;
    while (i < n && ++idx[static_cast<std::size_t>(i)] == prm.grid) idx[static_cast<std::size_t>(i++)] = 0;
    if (i == n) break;
  }
  return v;
}

/// Threshold "sup_holder.C": pass iff S <= C R.
inline Report verify_sup_holder(const Context & ctx, const SupHolderParams & prm, const Thresholds & th)
{
  Report rep("sup_holder");
  const double C = rep.threshold(th, "sup_holder.C");
  const SupHolderValues v = sup_holder_values(ctx, prm);
  rep.set("S", v.S);
  rep.set("R", v.R);
  rep.set("r0", ctx.constants.r0);
  rep.set_passed(v.S <= C * v.R);
  rep.metadata()["word"] = prm.word.to_string();
  return rep;
}

// ---------------------------------------------------------------------------------------------

struct DistanceSuiteParams
{
  std::size_t pairs{200};
  /// Pairs are x uniform in Omega, y = x + offset with |offset_i| <= pair_radius.
  double pair_radius{0.5};
  std::size_t box_samples{200};
  /// Scale r for the E round trips.
  double box_r{0.1};
};

/**
 * @brief rho_est <= d_est, E_inverse(E(h)) = h, and witness replay.
 *
 * Thresholds "distance.tol_factor" (rho <= d + factor tol), "distance.roundtrip" and
 * "distance.replay_factor" (replay error <= factor times the declared tolerance).
 */
inline Report verify_distance(const Context & ctx, const DistanceSuiteParams & prm, const Thresholds & th)
{
  Report rep("distance");
  const double tf = rep.threshold(th, "distance.tol_factor");
  const double rtt = rep.threshold(th, "distance.roundtrip");
  const double rf = rep.threshold(th, "distance.replay_factor");
  const ControlModel hor = ControlModel::horizontal(ctx.basis);
  const ControlModel ext = ControlModel::extended(ctx.basis);
  RandomStream rng(ctx.seed, 0xd15);
  std::vector<std::pair<Point, Point>> pairs;
  for (std::size_t i = 0; i < prm.pairs; ++i) {
    const Point x = ctx.omega.sample(rng);
    Point y = x;
    for (Eigen::Index j = 0; j < y.size(); ++j) y[j] += rng.uniform(-prm.pair_radius, prm.pair_radius);
    pairs.emplace_back(x, y);
  }
  DistanceConfig dc = ctx.distance;
  dc.threads = 1;
  struct Out
  {
    double d, rho, replay;
  };
  const auto outs = parallel_map(pairs.size(), ctx.threads, [&](std::size_t i) {
    const auto & [x, y] = pairs[i];
    const DistanceEstimate d = control_distance_upper(hor, x, y, dc, ctx.seed + i);
    DistanceConfig rc = dc;
    rc.candidates.push_back(embed_horizontal(ctx.basis, d.witness));
    const DistanceEstimate r = control_distance_upper(ext, x, y, rc, ctx.seed + i);
    const double replay = std::max(d.tolerance > 0 ? d.endpoint_error / d.tolerance : 0.0,
                                   r.tolerance > 0 ? r.endpoint_error / r.tolerance : 0.0);
    return Out{d.value, r.value, replay};
  });
  double worst_gap = -std::numeric_limits<double>::infinity(), replay = 0.0;
  std::size_t violations = 0;
  for (const auto & o : outs) {
    worst_gap = std::max(worst_gap, o.rho - o.d);
    if (o.rho > o.d + tf * dc.tol) ++violations;
    replay = std::max(replay, o.replay);
  }
  double rt = 0.0;
  for (std::size_t i = 0; i < prm.box_samples; ++i) {
    const Point x = ctx.omega.sample(rng);
    const MultiIndex I = select_maximal(ctx.basis, x, ctx.constants.C_hat * prm.box_r);
    const Point h = sample_box(ctx.basis, I, ctx.constants.eps_hat * prm.box_r, 1, rng())[0];
    double e;
    try {
      e = (E_inverse(ctx.basis, I, x, E_map(ctx.basis, I, x, h, ctx.integrator), prm.box_r, ctx.integrator) - h)
              .lpNorm<Eigen::Infinity>();
    } catch (const NumericalError &) {
      e = std::numeric_limits<double>::infinity();
    }
    rt = std::max(rt, e);
  }
  rep.set("max_rho_minus_d", worst_gap);
  rep.set("rho_le_d_violations", static_cast<double>(violations));
  rep.set("roundtrip_max", rt);
  rep.set("replay_max_ratio", replay);
  rep.set_passed(violations == 0 && rt <= rtt && replay <= rf);
  rep.metadata()["pairs"] = prm.pairs;
  return rep;
}

// ---------------------------------------------------------------------------------------------

struct EuclideanParams
{
  double s{0.5};
  double p{2.0};
  std::size_t pairs{20000};
  std::size_t gagliardo_pairs{80000};
};

/**
 * @brief Metric seminorm with the control estimator and proxy volume against the classical
 * Gagliardo seminorm, for frames whose distance is Euclidean.
 *
 * Threshold "euclidean.rel_tol". Shells start at the domain diameter.
 */
inline Report verify_euclidean(const Context & ctx, const EuclideanParams & prm, const Thresholds & th)
{
  Report rep("euclidean");
  const double tol = rep.threshold(th, "euclidean.rel_tol");
  DistanceConfig dc = ctx.distance;
  const EstimatorDistanceModel model(ctx.basis, dc, 1.0);
  SeminormConfig sc = ctx.seminorm;
  sc.pairs = prm.pairs;
  sc.max_d = 1.01 * ctx.omega.diameter();
  sc.seed = ctx.seed;
  sc.threads = ctx.threads;
  const SeminormResult a = seminorm_d(ctx.f, ctx.basis, ctx.omega, prm.s, prm.p, ctx.constants, model, sc);
  GagliardoConfig gc;
  gc.pairs = prm.gagliardo_pairs;
  gc.seed = ctx.seed;
  const SeminormResult b = classical_gagliardo(ctx.f, ctx.omega, prm.s, prm.p, gc);
  const double rel = b.value > 0 ? std::abs(a.value - b.value) / b.value : std::abs(a.value);
  rep.set("seminorm_d", a.value);
  rep.set("seminorm_d_stderr", a.stderr_);
  rep.set("gagliardo", b.value);
  rep.set("gagliardo_stderr", b.stderr_);
  rep.set("relative_difference", rel);
  rep.set("resampled_pairs", static_cast<double>(a.failures));
  rep.set_passed(rel <= tol);
  return rep;
}

// ---------------------------------------------------------------------------------------------

struct EquivalenceParams
{
  double s{0.5};
  double p{2.0};
  std::size_t base_pairs{4000};
  std::size_t base_x_samples{512};
  int doublings{2};
};

/// Threshold "equivalence.stability" applied to both ratios across doublings.
inline Report verify_equivalence(const Context & ctx, const EquivalenceParams & prm, const Thresholds & th)
{
  Report rep("equivalence");
  const double stab = rep.threshold(th, "equivalence.stability");
  if (!ctx.omega2 || !ctx.omega3) throw InputError("equivalence suite needs domain2 and domain3");
  const BoxDistanceModel model(ctx.basis, ctx.constants);
  std::vector<double> lower, upper;
  for (int k = 0; k <= prm.doublings; ++k) {
    SeminormConfig sc = ctx.seminorm;
    sc.pairs = prm.base_pairs << k;
    sc.seed = ctx.seed;
    sc.threads = ctx.threads;
    DirectionalConfig dc = ctx.directional;
    dc.x_samples = prm.base_x_samples << k;
    dc.seed = ctx.seed;
    dc.threads = ctx.threads;
    const EquivalenceResult r = equivalence_sides(ctx.f, ctx.basis, ctx.omega, *ctx.omega2, *ctx.omega3, prm.s, prm.p,
                                                  ctx.constants, model, sc, dc, ctx.lp);
    const std::string tag = ".k=" + std::to_string(k);
    rep.set("middle" + tag, r.middle);
    rep.set("inner" + tag, r.inner);
    rep.set("outer" + tag, r.outer);
    rep.set("lower_ratio" + tag, r.lower_ratio);
    rep.set("upper_ratio" + tag, r.upper_ratio);
    lower.push_back(r.lower_ratio);
    upper.push_back(r.upper_ratio);
  }
  const double sl = relative_spread(lower), su = relative_spread(upper);
  rep.set("lower_stability", sl);
  rep.set("upper_stability", su);
  rep.set_passed(sl < stab && su < stab);
  return rep;
}

}  // namespace carnot
