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
#include <random>

#include "common.hpp"

using namespace carnot;
using namespace carnot::test;
using Catch::Approx;

namespace {

double ev(const Expr & e, std::initializer_list<double> x)
{
  const std::vector<double> v(x);
  return evaluate(e, v);
}

// Random polynomial coefficient in x1..xn, degree <= 2.
std::string random_poly(std::mt19937_64 & rng, int n)
{
  std::uniform_int_distribution<int> c(-3, 3), var(1, n), shape(0, 3);
  std::string s = std::to_string(c(rng));
  for (int k = 0; k < 3; ++k) {
    const int a = c(rng);
    switch (shape(rng)) {
    case 0: s += " + " + std::to_string(a); break;
    case 1: s += " + " + std::to_string(a) + "*x" + std::to_string(var(rng)); break;
    case 2: s += " + " + std::to_string(a) + "*x" + std::to_string(var(rng)) + "*x" + std::to_string(var(rng)); break;
    default: s += " + " + std::to_string(a) + "*x" + std::to_string(var(rng)) + "^2"; break;
    }
  }
  return s;
}

VectorField random_field(std::mt19937_64 & rng, int n)
{
  std::vector<std::string> c;
  for (int i = 0; i < n; ++i) c.push_back(random_poly(rng, n));
  return VectorField::parse(c);
}

}  // namespace

TEST_CASE("expression parsing and evaluation", "[vf_core]")
{
  CHECK(ev(parse_expr("1 + 2*3", 1), {0}) == 7);
  CHECK(ev(parse_expr("x1^3 - x2/2", 2), {2, 4}) == 6);
  CHECK(ev(parse_expr("-x1^2", 1), {3}) == 9);
  CHECK(ev(parse_expr("sin(x1) + cos(x1)", 1), {0.3}) == Approx(std::sin(0.3) + std::cos(0.3)));
  CHECK(ev(parse_expr("exp(log(x1)) + sqrt(abs(x2))", 2), {2.5, -9}) == Approx(5.5));
  CHECK(ev(parse_expr("(x1 + 1) * (x1 - 1)", 1), {3}) == 8);
  CHECK(ev(parse_expr("2e-3 * x1", 1), {1000}) == Approx(2.0));
}

TEST_CASE("expression parse errors carry offsets", "[vf_core]")
{
  CHECK_THROWS_AS(parse_expr("x1 +", 1), ParseError);
  CHECK_THROWS_AS(parse_expr("x3", 2), InputError);
  CHECK_THROWS_AS(parse_expr("foo(x1)", 1), ParseError);
  CHECK_THROWS_AS(parse_expr("(x1", 1), ParseError);
  try {
    parse_expr("x1 $ 2", 1);
    FAIL("no throw");
  } catch (const ParseError & e) {
    CHECK(e.offset() == 3);
  }
}

TEST_CASE("derivatives match central differences", "[vf_core][property]")
{
  const Expr f = parse_expr("sin(x1*x2) + x1^3*exp(x2) - sqrt(x1^2 + 1)/x2", 2);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (int s = 0; s < 50; ++s) {
    const std::vector<double> x{u(rng), u(rng)};
    for (int k = 0; k < 2; ++k) {
      const double h = 1e-6;
      std::vector<double> xp = x, xm = x;
      xp[static_cast<std::size_t>(k)] += h;
      xm[static_cast<std::size_t>(k)] -= h;
      const double fd = (evaluate(f, xp) - evaluate(f, xm)) / (2 * h);
      CHECK(evaluate(derivative(f, k), x) == Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("simplify folds constants and zeros", "[vf_core]")
{
  CHECK(to_string(simplify(parse_expr("0*x1 + 2*3", 1))) == "6");
  CHECK(simplify(parse_expr("x1 - x1", 1)).is_zero());
  CHECK(to_string(derivative(parse_expr("2*x2", 2), 1)) == "2");
}

TEST_CASE("Heisenberg bracket", "[vf_core]")
{
  const auto b = heisenberg();
  const VectorField XY = lie_bracket(b.generators()[0], b.generators()[1]);
  CHECK(XY.to_string() == "(0, 0, -4)");
  CHECK(commutator_field(b.generators(), Word::parse("21")).to_string() == "(0, 0, 4)");
  CHECK(commutator_field(b.generators(), Word::parse("112")).is_zero());
}

TEST_CASE("bracket antisymmetry and Jacobi identity", "[vf_core][property]")
{
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 3;
    const VectorField X = random_field(rng, n), Y = random_field(rng, n), Z = random_field(rng, n);
    const VectorField xy = lie_bracket(X, Y), yx = lie_bracket(Y, X);
    const VectorField j1 = lie_bracket(X, lie_bracket(Y, Z));
    const VectorField j2 = lie_bracket(Y, lie_bracket(Z, X));
    const VectorField j3 = lie_bracket(Z, lie_bracket(X, Y));
    for (int s = 0; s < 5; ++s) {
      Point x(n);
      for (int i = 0; i < n; ++i) x[i] = u(rng);
      CHECK((xy.eval(x) + yx.eval(x)).norm() <= 1e-10 * (1 + xy.eval(x).norm()));
      const Point jac = j1.eval(x) + j2.eval(x) + j3.eval(x);
      CHECK(jac.norm() <= 1e-9 * (1 + j1.eval(x).norm() + j2.eval(x).norm()));
    }
  }
}

TEST_CASE("bracket is the commutator of derivations", "[vf_core][property]")
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  const Expr f = parse_expr("x1^2*x2 + sin(x3)", 3);
  for (int trial = 0; trial < 10; ++trial) {
    const VectorField X = random_field(rng, 3), Y = random_field(rng, 3);
    const Expr lhs = lie_bracket(X, Y).apply(f);
    const Expr rhs = X.apply(Y.apply(f)) - Y.apply(X.apply(f));
    for (int s = 0; s < 5; ++s) {
      const std::vector<double> x{u(rng), u(rng), u(rng)};
      CHECK(evaluate(lhs, x) == Approx(evaluate(rhs, x)).margin(1e-9));
    }
  }
}

TEST_CASE("words", "[vf_core]")
{
  const Word w = Word::parse("112");
  CHECK(w.length() == 3);
  CHECK(w[0] == 1);
  CHECK(w.to_string() == "112");
  CHECK(w.tail().to_string() == "12");
  CHECK(Word::parse("2") < Word::parse("11"));
  CHECK(Word::parse("12") < Word::parse("21"));
  CHECK_THROWS_AS(Word::parse(""), InputError);
  CHECK_THROWS_AS(Word::parse("1a"), ParseError);
  CHECK_THROWS_AS(Word::parse("0"), ParseError);
  const auto b = heisenberg();
  CHECK_THROWS_AS(commutator_field(b.generators(), Word::parse("13")), InputError);
}

TEST_CASE("commutator basis order and pruning", "[vf_core]")
{
  const auto h = heisenberg();
  REQUIRE(h.size() == 4);
  CHECK(h.word(1).to_string() == "1");
  CHECK(h.word(2).to_string() == "2");
  CHECK(h.word(3).to_string() == "12");
  CHECK(h.word(4).to_string() == "21");
  CHECK(h.lengths() == std::vector<int>{1, 1, 2, 2});
  CHECK(h.index_of(Word::parse("21")) == 4);

  // Brackets of a generator with itself vanish and are pruned.
  const auto s = step3();
  std::vector<std::string> words;
  for (const auto & e : s.entries()) words.push_back(e.word.to_string());
  CHECK(words == std::vector<std::string>{"1", "2", "12", "21", "112", "121"});
  CHECK(commutator_field(s.generators(), Word::parse("112")).to_string() == "(0, 0, 2)");

  const auto unpruned = enumerate_basis(s.generators(), 2, false);
  CHECK(unpruned.size() == 6);

  const auto e = euclidean(3);
  CHECK(e.size() == 3);
  CHECK_THROWS_AS(enumerate_basis({}, 2), InputError);
  CHECK_THROWS_AS(enumerate_basis(h.generators(), 0), InputError);
  CHECK_THROWS_AS(enumerate_basis({VectorField::parse({"1"}), VectorField::parse({"0", "1"})}, 1), DimensionError);
}

TEST_CASE("Hormander rank", "[vf_core]")
{
  const auto g = grushin();
  const auto ok = check_hormander(g, {pt({0, 0}), pt({0.5, 1})});
  CHECK(ok.satisfied);
  const auto g1 = enumerate_basis(g.generators(), 1);
  const auto bad = check_hormander(g1, {pt({0.5, 0}), pt({0, 0.3})});
  CHECK_FALSE(bad.satisfied);
  CHECK(bad.failing == std::vector<std::size_t>{1});
  CHECK(bad.ranks == std::vector<int>{2, 1});
}

TEST_CASE("multi-indices", "[vf_core]")
{
  const auto h = heisenberg();
  CHECK(ell(h, MultiIndex{1, 2, 3}) == 4);
  CHECK(ell(h, MultiIndex{3, 4, 1}) == 5);
  CHECK(MultiIndex{1, 2, 3}.to_string() == "(1,2,3)");
  CHECK_THROWS_AS(check_multi_index(h, MultiIndex{1, 2}), DimensionError);
  CHECK_THROWS_AS(check_multi_index(h, MultiIndex{1, 2, 5}), InputError);
  CHECK_THROWS_AS(check_multi_index(h, MultiIndex{0, 1, 2}), InputError);
}

TEST_CASE("vector field evaluation and dimension checks", "[vf_core]")
{
  const auto h = heisenberg();
  const Point v = h.field(1).eval(pt({0.3, -0.2, 0.1}));
  CHECK(v[0] == 1);
  CHECK(v[2] == Approx(-0.4));
  CHECK_THROWS_AS(VectorField::parse({"x3", "0"}), InputError);
  const auto F = h.frame(pt({0.3, -0.2, 0.1}));
  CHECK(F.rows() == 3);
  CHECK(F.cols() == 4);
  CHECK(F(2, 2) == -4);
}
