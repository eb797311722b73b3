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


#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "common.hpp"

using namespace carnot;
using namespace carnot::test;
using Catch::Approx;

namespace {

// (int int_{[0,1]^2 x [0,1]^2} |x1 - y1|^2 / |x - y|^3)^{1/2} in polar coordinates around the
// difference vector, on a midpoint grid in (theta, rho / R(theta)).
double gagliardo_x1_unit_square(int n = 200)
{
  double total = 0.0;
  const double dth = 0.5 * std::numbers::pi / n;
  for (int i = 0; i < n; ++i) {
    const double th = (i + 0.5) * dth;
    const double c = std::cos(th), s = std::sin(th);
    const double R = 1.0 / std::max(c, s);
    for (int j = 0; j < n; ++j) {
      const double rho = (j + 0.5) / n * R;
      total += c * c * (1.0 - rho * c) * (1.0 - rho * s) * R / n * dth;
    }
  }
  return std::sqrt(4.0 * total);
}

}  // namespace

TEST_CASE("Lp norm on a grid and by Monte Carlo", "[seminorms]")
{
  const Domain unit = Domain::cube(2, 0.0, 1.0);
  const Expr f = expr("x1");
  CHECK(lp_norm(f, unit, 2.0) == Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-3));
  CHECK(lp_norm(f, unit, 1.0) == Approx(0.5).epsilon(1e-12));
  LpConfig mc;
  mc.monte_carlo = true;
  mc.samples = 200000;
  mc.seed = 7;
  CHECK(lp_norm(f, unit, 2.0, mc) == Approx(std::sqrt(1.0 / 3.0)).epsilon(5e-3));
  CHECK_THROWS_AS(lp_norm(f, unit, 0.5), InputError);
  CHECK_THROWS_AS(lp_norm(expr("x3"), unit, 2.0), DimensionError);
  CHECK_THROWS_AS(lp_norm(expr("log(x1)"), Domain::cube(1, -1.0, 1.0), 2.0), DomainError);
}

TEST_CASE("Folland-Stein norm of x3 on the Heisenberg cube", "[seminorms]")
{
  // ||x3||_1 = 4, X x3 = 2 x2 and Y x3 = -2 x1 each have L1 norm 8.
  const CommutatorBasis b = heisenberg();
  CHECK(folland_stein_rhs(expr("x3"), b.generators(), Domain::cube(3, -1.0, 1.0), 1.0) == Approx(20.0).epsilon(1e-12));
}

TEST_CASE("Gauss-Legendre rules are exact to degree 2m - 1", "[seminorms]")
{
  for (int m = 1; m <= 8; ++m) {
    const auto [x, w] = detail::gauss_legendre(m);
    REQUIRE(x.size() == static_cast<std::size_t>(m));
    for (int deg = 0; deg <= 2 * m - 1; ++deg) {
      double q = 0.0;
      for (int i = 0; i < m; ++i) q += w[static_cast<std::size_t>(i)] * std::pow(x[static_cast<std::size_t>(i)], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(q == Approx(exact).margin(1e-13));
    }
  }
}

TEST_CASE("classical Gagliardo seminorm matches the polar quadrature", "[seminorms]")
{
  const double oracle = gagliardo_x1_unit_square();
  CHECK(oracle == Approx(1.2192640).epsilon(1e-5));
  GagliardoConfig gc;
  gc.pairs = 80000;
  gc.seed = 3;
  const SeminormResult r = classical_gagliardo(expr("x1"), Domain::cube(2, 0.0, 1.0), 0.5, 2.0, gc);
  CHECK(r.value == Approx(oracle).epsilon(0.03));
  CHECK(r.stderr_ > 0.0);
  CHECK_THROWS_AS(classical_gagliardo(expr("x1"), Domain::cube(2, 0.0, 1.0), 1.0, 2.0), InputError);
}

TEST_CASE("metric seminorm with Euclidean distance matches the classical one", "[seminorms]")
{
  const CommutatorBasis b = euclidean(2);
  const Domain unit = Domain::cube(2, 0.0, 1.0);
  DistanceConfig dc;
  dc.segments = 2;
  dc.starts = 2;
  dc.rel_precision = 1e-3;
  const EstimatorDistanceModel model(b, dc);
  SeminormConfig sc;
  sc.pairs = 3000;
  sc.max_d = 1.01 * unit.diameter();
  sc.seed = 11;
  const SeminormResult r = seminorm_d(expr("x1"), b, unit, 0.5, 2.0, BallBoxConstants{}, model, sc);
  CHECK(r.value == Approx(gagliardo_x1_unit_square()).epsilon(0.15));
}

TEST_CASE("metric seminorm invariances", "[seminorms][property]")
{
  const CommutatorBasis b = heisenberg();
  const Domain omega = Domain::cube(3, -1.0, 1.0);
  const BallBoxConstants c;
  const BoxDistanceModel model(b, c);
  SeminormConfig sc;
  sc.pairs = 2400;
  sc.seed = 5;
  const PairSampleSet set = sample_pairs(b, omega, c, model, sc);
  REQUIRE(set.samples.size() == 2400);
  CHECK(seminorm_from_samples(set, expr("3.5"), 0.5, 2.0).value == 0.0);
  for (const char * g : {"x3", "x1*x2 + x3", "sin(x1) * x3"}) {
    const Expr f = expr(g);
    const Expr shifted = expr(std::string("(") + g + ") + 7");
    const Expr scaled = expr(std::string("-3 * (") + g + ")");
    for (double p : {1.0, 2.0, 3.0}) {
      const double v = seminorm_from_samples(set, f, 0.5, p).value;
      CHECK(v > 0.0);
      CHECK(seminorm_from_samples(set, shifted, 0.5, p).value == Approx(v).epsilon(1e-12));
      CHECK(seminorm_from_samples(set, scaled, 0.5, p).value == Approx(3.0 * v).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(seminorm_from_samples(set, expr("x3"), 1.0, 2.0), InputError);
  CHECK_THROWS_AS(seminorm_from_samples(set, expr("x3"), 0.5, 0.5), InputError);
}

TEST_CASE("metric seminorm grows with s", "[seminorms][property]")
{
  const CommutatorBasis b = heisenberg();
  const Domain omega = Domain::cube(3, -1.0, 1.0);
  const BallBoxConstants c;
  const BoxDistanceModel model(b, c);
  SeminormConfig sc;
  sc.pairs = 2400;
  sc.seed = 9;
  const PairSampleSet set = sample_pairs(b, omega, c, model, sc);
  const Expr f = expr("x3 + x1");
  double prev = 0.0;
  for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double v = seminorm_from_samples(set, f, s, 2.0).value;
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("metric seminorm is reproducible and thread independent", "[seminorms]")
{
  const CommutatorBasis b = heisenberg();
  const Domain omega = Domain::cube(3, -1.0, 1.0);
  const BallBoxConstants c;
  const BoxDistanceModel model(b, c);
  SeminormConfig sc;
  sc.pairs = 1200;
  sc.seed = 21;
  const Expr f = expr("x3");
  const SeminormResult a = seminorm_d(f, b, omega, 0.5, 2.0, c, model, sc);
  sc.threads = 3;
  const SeminormResult t = seminorm_d(f, b, omega, 0.5, 2.0, c, model, sc);
  CHECK(a.value == t.value);
  CHECK(a.stderr_ == t.stderr_);
  sc.seed = 22;
  CHECK(seminorm_d(f, b, omega, 0.5, 2.0, c, model, sc).value != a.value);
}

TEST_CASE("sample_pairs rejects bad input", "[seminorms]")
{
  const CommutatorBasis b = heisenberg();
  const BallBoxConstants c;
  const BoxDistanceModel model(b, c);
  SeminormConfig sc;
  CHECK_THROWS_AS(sample_pairs(b, Domain::cube(2, -1.0, 1.0), c, model, sc), DimensionError);
  sc.k_max = 0;
  CHECK_THROWS_AS(sample_pairs(b, Domain::cube(3, -1.0, 1.0), c, model, sc), InputError);
  CHECK_THROWS_AS(Domain(pt({0.0, 1.0}), pt({1.0, 1.0})), InputError);
}

TEST_CASE("directional seminorm of a linear flow has a closed form", "[seminorms]")
{
  // Z = [X, Y] = -4 d3 moves x3 by -4t, so the inner integral is 16 int_0^r0 t^{2 - 1 - 2 eps} dt.
  const CommutatorBasis b = heisenberg();
  const VectorField Z = b.field(3);
  const Domain omega = Domain::cube(3, -1.0, 1.0);
  const double r0 = 0.5, eps = 0.25;
  DirectionalConfig dc;
  dc.x_samples = 64;
  dc.restrict_to_domain = false;
  const double exact = std::sqrt(8.0 * 16.0 * std::pow(r0, 2.0 - 2.0 * eps) / (2.0 - 2.0 * eps));
  CHECK(exact == Approx(5.4927).epsilon(1e-4));
  const DirectionalResult r = seminorm_dir(expr("x3"), Z, omega, eps, 2.0, r0, dc);
  CHECK(r.value == Approx(exact).epsilon(1e-6));
  CHECK(r.exit_fraction == 0.0);

  dc.restrict_to_domain = true;
  const DirectionalResult cut = seminorm_dir(expr("x3"), Z, omega, eps, 2.0, r0, dc);
  CHECK(cut.exit_fraction > 0.0);
  CHECK(cut.value < r.value);

  dc.tail_correction = false;
  dc.restrict_to_domain = false;
  dc.t_levels = 4;
  CHECK(seminorm_dir(expr("x3"), Z, omega, eps, 2.0, r0, dc).value < r.value);

  CHECK_THROWS_AS(seminorm_dir(expr("x3"), Z, omega, 1.0, 2.0, r0), InputError);
  CHECK_THROWS_AS(seminorm_dir(expr("x3"), Z, omega, 0.5, 2.0, 0.0), InputError);
  CHECK_THROWS_AS(seminorm_dir(expr("x1"), VectorField::coordinate(2, 0), omega, 0.5, 2.0, r0), DimensionError);
}

TEST_CASE("directional seminorm is thread independent", "[seminorms]")
{
  const CommutatorBasis b = heisenberg();
  DirectionalConfig dc;
  dc.x_samples = 128;
  dc.seed = 4;
  const Expr f = expr("sin(x1) + x3");
  const double one = seminorm_dir(f, b.field(1), Domain::cube(3, -1.0, 1.0), 0.5, 2.0, 0.5, dc).value;
  dc.threads = 4;
  CHECK(seminorm_dir(f, b.field(1), Domain::cube(3, -1.0, 1.0), 0.5, 2.0, 0.5, dc).value == one);
}

TEST_CASE("doubling the pair count stays within three standard errors", "[seminorms][property]")
{
  const CommutatorBasis b = heisenberg();
  const Domain omega = Domain::cube(3, -1.0, 1.0);
  const BallBoxConstants c;
  const BoxDistanceModel model(b, c);
  SeminormConfig sc;
  sc.k_max = 20;
  for (const char * g : {"x3", "x1*x2 + x3"}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      sc.seed = seed;
      sc.pairs = 4000;
      const SeminormResult a = seminorm_d(expr(g), b, omega, 0.5, 2.0, c, model, sc);
      sc.pairs = 8000;
      sc.seed = seed + 100;
      const SeminormResult d = seminorm_d(expr(g), b, omega, 0.5, 2.0, c, model, sc);
      CHECK(std::abs(a.value - d.value) < 3.0 * std::hypot(a.stderr_, d.stderr_));
    }
  }
}
