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

TEST_CASE("Heisenberg determinants", "[ballbox]")
{
  const auto b = heisenberg();
  const Point x = pt({0.3, -0.2, 0.7});
  CHECK(lambda_I(b, MultiIndex{1, 2, 3}, x) == Approx(-4.0));
  CHECK(lambda_I(b, MultiIndex{1, 2, 4}, x) == Approx(4.0));
  CHECK(lambda_I(b, MultiIndex{1, 3, 4}, x) == 0.0);
  CHECK(lambda_I(b, MultiIndex{2, 1, 3}, x) == Approx(4.0));
  const DeterminantTable t(b, x);
  REQUIRE(t.rows().size() == 4u);
  CHECK(t.rows()[0].K == MultiIndex{1, 2, 3});
  CHECK(t.rows()[0].ell == 4);
  CHECK(t.max_value(0.1) == Approx(4e-4));
  // (1,2,3) and (1,2,4) tie; the lexicographically smaller wins.
  CHECK(select_maximal(b, x, 0.1) == MultiIndex{1, 2, 3});
  CHECK(is_eta_maximal(b, MultiIndex{1, 2, 3}, x, 0.1, 0.5));
  CHECK(is_eta_maximal(b, MultiIndex{1, 2, 4}, x, 0.1, 0.5));
  CHECK_FALSE(is_eta_maximal(b, MultiIndex{1, 3, 4}, x, 0.1, 0.5));
  // Strict inequality: eta = 1 excludes the maximiser itself.
  CHECK_FALSE(is_eta_maximal(b, MultiIndex{1, 2, 3}, x, 0.1, 1.0));
}

TEST_CASE("volume proxy exponent is the homogeneous dimension", "[ballbox]")
{
  const auto b = heisenberg();
  for (double r : {1e-3, 1e-2, 1e-1}) CHECK(volume_proxy(b, pt({0, 0, 0}), r) == Approx(4 * std::pow(r, 4)));
  const auto e = euclidean(3);
  CHECK(volume_proxy(e, pt({0.2, 0.1, 0}), 0.3) == Approx(0.027));
  // l(I) >= n for every I, so the proxy decays at least like r^n.
  const auto s = step3();
  const Point x = pt({0.4, 0.1, 0});
  CHECK(volume_proxy(s, x, 1e-3) / volume_proxy(s, x, 1e-2) <= std::pow(0.1, 3) * (1 + 1e-12));
}

TEST_CASE("Grushin selection switches with scale", "[ballbox]")
{
  const auto b = grushin();
  const Point x = pt({0.5, 0});
  // |lambda_(1,2)| r^2 = r^2 / 2 against |lambda_(1,3)| r^3 = r^3.
  CHECK(select_maximal(b, x, 0.25) == MultiIndex{1, 2});
  CHECK(select_maximal(b, x, 1.0) == MultiIndex{1, 3});
  CHECK(select_maximal(b, x, 0.5) == MultiIndex{1, 2});
  CHECK(select_maximal(b, pt({0, 0.3}), 0.01) == MultiIndex{1, 3});
}

TEST_CASE("non-spanning frames are rejected", "[ballbox]")
{
  const auto b = enumerate_basis({VectorField::parse({"1", "0"})}, 1);
  CHECK_THROWS_AS(select_maximal(b, pt({0, 0}), 0.1), HormanderError);
  const auto g = enumerate_basis(grushin().generators(), 1);
  CHECK_THROWS_AS(select_maximal(g, pt({0, 0}), 0.1), HormanderError);
  CHECK_THROWS_AS(select_maximal(grushin(), pt({0, 0}), 0.0), InputError);
}

TEST_CASE("maximal annulus matches a radius scan", "[ballbox][property]")
{
  const BallBoxConstants c{0.5, 0.3, 2.0, 0.5};
  const auto b = grushin();
  RandomStream rng(8);
  for (int s = 0; s < 30; ++s) {
    const Point x = pt({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const DeterminantTable table(b, x);
    for (const auto & row : table.rows()) {
      const RadiusInterval a = maximal_annulus(b, row.K, x, c);
      for (int k = 1; k <= 400; ++k) {
        const double r = c.r0 * k / 400.0;
        const bool scan = row.abs_lambda > 0 && is_eta_maximal(b, row.K, x, c.C_hat * r, c.eta);
        const double edge = std::min(std::abs(r - a.lo), std::abs(r - a.hi));
        if (edge > 1e-9) CHECK(scan == a.contains(r));
      }
    }
  }
}

TEST_CASE("anisotropic boxes", "[ballbox]")
{
  const auto b = heisenberg();
  const MultiIndex I{1, 2, 3};
  CHECK(box_norm(b, I, pt({0.05, -0.02, 0.0036})) == Approx(0.06));
  CHECK(box_contains(b, I, 0.1, pt({0.09, 0.09, 0.0099})));
  CHECK_FALSE(box_contains(b, I, 0.1, pt({0.0, 0.0, 0.01})));
  CHECK(box_volume(b, I, 0.1) == Approx(8e-4));
  const auto hs = sample_box(b, I, 0.1, 2000, 3);
  Point mean = Point::Zero(3);
  for (const auto & h : hs) {
    CHECK(box_contains(b, I, 0.1, h));
    mean += h;
  }
  mean /= 2000.0;
  CHECK(std::abs(mean[0]) < 0.01);
  CHECK(std::abs(mean[2]) < 0.001);
  CHECK(sample_box(b, I, 0.1, 5, 3)[4] == sample_box(b, I, 0.1, 5, 3)[4]);
}

TEST_CASE("Monte Carlo volume of a disc", "[ballbox]")
{
  const auto est = ball_volume_mc(pt({-1, -1}), pt({1, 1}), [](const Point & y) { return y.norm() < 1.0; }, 100000, 1);
  CHECK(std::abs(est.value - std::numbers::pi) < 4 * est.stderr_);
  CHECK(est.count == 100000u);
  CHECK_THROWS_AS(ball_volume_mc(pt({0}), pt({0}), [](const Point &) { return true; }, 10, 1), InputError);
}

TEST_CASE("ball-box constants are validated", "[ballbox]")
{
  CHECK_NOTHROW(BallBoxConstants{}.validate());
  CHECK_THROWS_AS((BallBoxConstants{1.0, 0.3, 2.0, 0.5}.validate()), InputError);
  CHECK_THROWS_AS((BallBoxConstants{0.5, 0.0, 2.0, 0.5}.validate()), InputError);
  CHECK_THROWS_AS((BallBoxConstants{0.5, 0.3, 1.0, 0.5}.validate()), InputError);
  CHECK_THROWS_AS((BallBoxConstants{0.5, 0.3, 2.0, -1.0}.validate()), InputError);
}
