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

DistanceConfig quick(int segments = 8, int starts = 4)
{
  DistanceConfig c;
  c.segments = segments;
  c.starts = starts;
  c.rel_precision = 1e-3;
  return c;
}

// Regular octagon with perimeter L encloses 2 (1 + sqrt 2) (L / 8)^2; the vertical gain is 4 x area.
double octagon_length(double t) { return std::sqrt(std::abs(t) / 4.0 / (2.0 * (1.0 + std::sqrt(2.0)) / 64.0)); }

}  // namespace

TEST_CASE("Euclidean frames give Euclidean distance", "[metric]")
{
  const auto b = euclidean(2);
  const auto d = cc_distance_upper(b, pt({0.1, 0.2}), pt({0.4, 0.6}), quick(1, 1), 1);
  CHECK(d.value == Approx(0.5).epsilon(2e-3));
  CHECK(d.value >= 0.5 - 1e-6);
  CHECK(d.endpoint_error <= d.tolerance);
  CHECK(d.witness.max_control_norm() <= 1.0 + 1e-12);
  const auto z = cc_distance_upper(b, pt({0.1, 0.2}), pt({0.1, 0.2}), quick(1, 1), 1);
  CHECK(z.value == 0.0);
}

TEST_CASE("Heisenberg horizontal and vertical distances", "[metric]")
{
  const auto b = heisenberg();
  const auto h = cc_distance_upper(b, pt({0, 0, 0}), pt({0.5, 0, 0}), quick(), 2);
  CHECK(h.value == Approx(0.5).epsilon(2e-3));
  const double t = -0.04;
  const auto v = cc_distance_upper(b, pt({0, 0, 0}), pt({0, 0, t}), quick(), 3);
  // Isoperimetric lower bound sqrt(pi |t|); the best closed 8-gon gives the upper value.
  CHECK(v.value >= std::sqrt(std::numbers::pi * std::abs(t)) * (1 - 1e-6));
  CHECK(v.value <= octagon_length(t) * (1 + 2e-3));
  CHECK(v.endpoint_error <= v.tolerance);
  const ControlModel m = ControlModel::horizontal(b);
  CHECK((m.endpoint(v.witness, pt({0, 0, 0}), DistanceConfig{}.integrator) - pt({0, 0, t})).norm() <= v.tolerance);
}

TEST_CASE("rho uses the commutator directions", "[metric]")
{
  const auto b = heisenberg();
  // Y_3 = -4 d3 and Y_4 = 4 d3 with |b| <= 1 reach speed 4 sqrt(2) r^2.
  const double expect = std::sqrt(0.04 / (4.0 * std::sqrt(2.0)));
  const auto r = rho_distance_upper(b, pt({0, 0, 0}), pt({0, 0, -0.04}), quick(), 4);
  CHECK(r.value == Approx(expect).epsilon(3e-3));
  CHECK(r.endpoint_error <= r.tolerance);
}

TEST_CASE("rho is below d with the embedded witness", "[metric][property]")
{
  const auto b = heisenberg();
  RandomStream rng(12);
  const ControlModel ext = ControlModel::extended(b);
  for (int s = 0; s < 5; ++s) {
    const Point x = pt({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const Point y = x + pt({rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)});
    DistanceConfig c = quick(8, 2);
    const auto d = cc_distance_upper(b, x, y, c, s);
    c.candidates.push_back(embed_horizontal(b, d.witness));
    const auto r = rho_distance_upper(b, x, y, c, s);
    CHECK(r.value <= d.value + 2 * c.tol);
    // The embedded witness alone reaches y.
    CHECK((ext.endpoint(embed_horizontal(b, d.witness), x, c.integrator) - y).norm() <= 10 * d.tolerance);
  }
}

TEST_CASE("Heisenberg distance scales under dilations", "[metric][property]")
{
  const auto b = heisenberg();
  const Point p = pt({0.2, 0.1, 0.05});
  const double d1 = cc_distance_upper(b, pt({0, 0, 0}), p, quick(), 5).value;
  const double d2 = cc_distance_upper(b, pt({0, 0, 0}), pt({0.4, 0.2, 0.2}), quick(), 5).value;
  CHECK(d2 == Approx(2 * d1).epsilon(0.01));
  // The fields do not depend on x3.
  const double d3 = cc_distance_upper(b, pt({0, 0, 0.3}), pt({0.2, 0.1, 0.35}), quick(), 5).value;
  CHECK(d3 == Approx(d1).epsilon(0.01));
}

TEST_CASE("triangle inequality holds up to estimator precision", "[metric][property]")
{
  const auto b = grushin();
  RandomStream rng(13);
  for (int s = 0; s < 4; ++s) {
    const Point x = pt({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const Point y = pt({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const Point z = pt({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const double xz = cc_distance_upper(b, x, z, quick(), s).value;
    const double xy = cc_distance_upper(b, x, y, quick(), s).value;
    const double yz = cc_distance_upper(b, y, z, quick(), s).value;
    CHECK(xz <= (xy + yz) * 1.02);
  }
}

TEST_CASE("concatenated controls follow both parts", "[metric]")
{
  const auto b = heisenberg();
  const ControlModel m = ControlModel::horizontal(b);
  const ControlPath a{0.3, 2, {1, 0, 0, 1}, {}};
  const ControlPath c{0.2, 2, {-0.6, 0.8}, {}};
  const IntegratorConfig cfg;
  const Point x = pt({0.1, 0.2, 0.3});
  const Point mid = m.endpoint(a, x, cfg);
  const ControlPath ac = concatenate(m, a, c);
  CHECK(ac.r == Approx(0.5));
  CHECK(ac.segments() == 3);
  CHECK((m.endpoint(ac, x, cfg) - m.endpoint(c, mid, cfg)).norm() < 1e-10);
  const ControlModel e = ControlModel::extended(b);
  const ControlPath p{0.1, 4, {0, 0, 1, 0}, {}};
  const ControlPath q{0.1, 4, {0, 0, 0, 1}, {}};
  CHECK((e.endpoint(concatenate(e, p, q), x, cfg) - e.endpoint(q, e.endpoint(p, x, cfg), cfg)).norm() < 1e-10);
}

TEST_CASE("linearization matches finite differences", "[metric][property]")
{
  const auto b = grushin();
  const ControlModel m = ControlModel::extended(b);
  ControlPath p{0.4, m.width(), {}, {}};
  RandomStream rng(2);
  for (int k = 0; k < 3 * m.width(); ++k) p.b.push_back(rng.uniform(-0.5, 0.5));
  const IntegratorConfig cfg{0.05, 1e-12, 1 << 16};
  const Point x = pt({0.3, -0.1});
  const auto lin = m.linearize(p, x, cfg);
  CHECK((lin.endpoint - m.endpoint(p, x, cfg)).norm() < 1e-10);
  for (std::size_t k = 0; k < p.b.size(); ++k) {
    ControlPath pp = p, pm = p;
    pp.b[k] += 1e-6;
    pm.b[k] -= 1e-6;
    const Point fd = (m.endpoint(pp, x, cfg) - m.endpoint(pm, x, cfg)) / 2e-6;
    CHECK((fd - lin.jacobian.col(static_cast<Eigen::Index>(k))).norm() < 1e-6);
  }
}

TEST_CASE("no feasible path raises", "[metric]")
{
  const auto b = heisenberg();
  DistanceConfig c = quick(2, 1);
  c.r_max = 0.01;
  CHECK_THROWS_AS(cc_distance_upper(b, pt({0, 0, 0}), pt({1, 0, 0}), c, 1), NoPathFound);
  CHECK_THROWS_AS(cc_distance_upper(b, pt({0, 0}), pt({1, 0, 0}), c, 1), DimensionError);
}

TEST_CASE("box distance", "[metric]")
{
  const auto b = heisenberg();
  const BallBoxConstants c;
  const BoxDistance d = box_distance(b, pt({0, 0, 0}), pt({0, 0, -0.04}), c);
  CHECK(d.value == Approx(0.1 / 0.6).epsilon(1e-9));
  CHECK(d.I == MultiIndex{1, 2, 3});
  CHECK(box_distance_below(b, pt({0, 0, 0}), pt({0, 0, -0.04}), 0.17, c));
  CHECK_FALSE(box_distance_below(b, pt({0, 0, 0}), pt({0, 0, -0.04}), 0.16, c));
  CHECK_THROWS_AS(box_distance(b, pt({0, 0, 0}), pt({5, 0, 0}), c), OutOfRange);
  const PathPlan plan = connect_points(b, pt({0, 0, 0}), pt({0, 0, -0.04}), c);
  CHECK(plan.legs.size() == 4u);
  CHECK((plan.endpoint(b.generators()) - pt({0, 0, -0.04})).norm() < 1e-10);
  const auto box = ball_bounding_box(b, pt({0, 0, 0}), 0.1, c);
  CHECK(box.first[0] == Approx(-0.12));
  CHECK(box.second[2] > 0.0);
}

TEST_CASE("Holder ratio scan", "[metric]")
{
  const auto e = euclidean(2);
  const HolderScan s = holder_ratio_scan(e, pt({0, 0}), pt({1, 1}), 1, 10, 4, quick(1, 1));
  CHECK(s.ratios.size() == 10u);
  for (double r : s.ratios) CHECK(r == Approx(1.0).epsilon(2e-3));
  const auto h = heisenberg();
  const HolderScan t = holder_ratio_scan(h, pt({-1, -1, -1}), pt({1, 1, 1}), 2, 8, 4, quick(8, 1));
  CHECK(std::isfinite(t.max_ratio));
  CHECK(t.q50 <= t.max_ratio);
}

TEST_CASE("distance estimates are reproducible and thread independent", "[metric]")
{
  const auto b = heisenberg();
  DistanceConfig c = quick(8, 4);
  const auto a = cc_distance_upper(b, pt({0, 0, 0}), pt({0.1, 0.2, 0.05}), c, 9);
  c.threads = 3;
  const auto d = cc_distance_upper(b, pt({0, 0, 0}), pt({0.1, 0.2, 0.05}), c, 9);
  CHECK(a.value == d.value);
  CHECK(a.witness.b == d.witness.b);
}
