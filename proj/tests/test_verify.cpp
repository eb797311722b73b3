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
#include <string>

#include "common.hpp"

using namespace carnot;
using namespace carnot::test;
using Catch::Approx;

namespace {

json minimal()
{
  return json::parse(R"({
    "name": "mini",
    "dimension": 3,
    "generators": [["1", "0", "2*x2"], ["0", "1", "-2*x1"]],
    "step": 2,
    "domain": {"lo": [-1, -1, -1], "hi": [1, 1, 1]},
    "function": "x3",
    "seed": 42
  })");
}

std::string scenario_path(const char * name) { return std::string(CARNOT_SCENARIO_DIR) + "/" + name; }

}  // namespace

TEST_CASE("FNV-1a reference vectors", "[verify]")
{
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
  CHECK(hex64(fnv1a64("foobar")) == "85944171f73967e8");
}

TEST_CASE("report serialization", "[verify]")
{
  Report r("demo");
  r.set("alpha", 1.5);
  r.set("bad", std::nan(""));
  r.set("alpha", 2.5);
  Thresholds th({{"demo.tol", 0.1}});
  CHECK(r.threshold(th, "demo.tol") == 0.1);
  CHECK_THROWS_AS(r.threshold(th, "demo.other"), InputError);
  const json j = r.to_json(false);
  CHECK(j["values"]["alpha"] == 2.5);
  CHECK(j["values"]["bad"].is_null());
  CHECK(j["thresholds"]["demo.tol"] == 0.1);
  CHECK_FALSE(j["metadata"].contains("timestamp"));
  CHECK(r.to_json(true)["metadata"].contains("timestamp"));
  CHECK(r.to_csv() == "name,value\r\npassed,1\r\nalpha,2.5\r\nbad,nan\r\n");
  CHECK(csv_cell("a,b") == "\"a,b\"");
  CHECK(csv_cell("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_cell("plain") == "plain");
  CHECK(std::stod(format_double(0.1)) == 0.1);

  Report other("x");
  other.set("v", 1.0);
  other.set_passed(false);
  r.merge(other, "x");
  CHECK(r.get("x.v") == 1.0);
  CHECK_FALSE(r.passed());
  CHECK_THROWS_AS(r.get("missing"), InputError);
}

TEST_CASE("slope and spread helpers", "[verify]")
{
  CHECK(loglog_slope({1, 2, 4, 8}, {3, 12, 48, 192}) == Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_slope({1}, {1}), InputError);
  CHECK(relative_spread({2.0, 3.0, 2.5}) == Approx(0.5));
  CHECK(relative_spread({0.0, 0.0}) == 0.0);
  CHECK(std::isinf(relative_spread({0.0, 1.0})));
}

TEST_CASE("scenario parsing and schema errors", "[verify][scenario]")
{
  const Scenario s = Scenario::from_json(minimal());
  CHECK(s.name() == "mini");
  CHECK(s.basis().size() == 4);
  CHECK(s.context().seed == 42);
  CHECK(s.suites().empty());

  auto broken = [](auto edit) {
    json j = minimal();
    edit(j);
    return j;
  };
  CHECK_THROWS_AS(Scenario::from_json(broken([](json & j) { j.erase("function"); })), SchemaError);
  CHECK_THROWS_AS(Scenario::from_json(broken([](json & j) { j["colour"] = "red"; })), SchemaError);
  CHECK_THROWS_AS(Scenario::from_json(broken([](json & j) { j["dimension"] = "three"; })), SchemaError);
  CHECK_THROWS_AS(Scenario::from_json(broken([](json & j) { j["generators"][0] = json::array({"1", "0"}); })), SchemaError);
  CHECK_THROWS_AS(Scenario::from_json(broken([](json & j) { j["domain"]["hi"][0] = -2; })), SchemaError);
  CHECK_THROWS_AS(Scenario::from_json(broken([](json & j) { j["constants"] = {{"C_hat", 0.5}}; })), SchemaError);
  CHECK_THROWS_AS(Scenario::from_json(broken([](json & j) { j["suites"] = {{"nonsense", json::object()}}; })), SchemaError);
  CHECK_THROWS_AS(Scenario::from_json(broken([](json & j) { j["suites"] = {{"bracket", {{"words", {"13"}}}}}; })), SchemaError);
  CHECK_THROWS_AS(Scenario::from_json(broken([](json & j) { j["suites"] = {{"bracket", {{"typo", 1}}}}; })), SchemaError);
  CHECK_THROWS_AS(Scenario::from_json(broken([](json & j) { j["thresholds"] = {{"bracket.min_order", "high"}}; })), SchemaError);
  CHECK_THROWS_AS(Scenario::from_json(broken([](json & j) { j["function"] = "x1 +"; })), ParseError);
  CHECK_THROWS_AS(Scenario::from_json(broken([](json & j) { j["function"] = "x4"; })), InputError);
  const Scenario flat = Scenario::from_json(broken([](json & j) { j["generators"][1] = json::array({"2", "0", "4*x2"}); }));
  CHECK_THROWS_AS(select_maximal(flat.basis(), pt({0, 0, 0}), 0.1), HormanderError);
  CHECK_THROWS_AS(Scenario::load(scenario_path("does_not_exist.json")), SchemaError);
}

TEST_CASE("scenario hash ignores key order and tracks content", "[verify][scenario]")
{
  const json a = minimal();
  const json b = json::parse(R"({"seed": 42, "function": "x3", "step": 2, "name": "mini", "dimension": 3,
    "domain": {"hi": [1, 1, 1], "lo": [-1, -1, -1]}, "generators": [["1", "0", "2*x2"], ["0", "1", "-2*x1"]]})");
  const std::string h = Scenario::from_json(a).hash();
  CHECK(h.size() == 16);
  CHECK(Scenario::from_json(b).hash() == h);
  json c = a;
  c["seed"] = 43;
  CHECK(Scenario::from_json(c).hash() != h);
  c = a;
  c["function"] = "x3 + 0";
  CHECK(Scenario::from_json(c).hash() != h);
}

TEST_CASE("bundled scenarios load", "[verify][scenario]")
{
  for (const char * f : {"heisenberg.json", "grushin.json", "step3.json", "euclidean1.json", "euclidean2.json", "euclidean3.json"}) {
    const Scenario s = Scenario::load(scenario_path(f));
    CHECK_FALSE(s.suites().empty());
    for (const auto & suite : s.suites()) {
      CHECK(std::find(suite_names().begin(), suite_names().end(), suite) != suite_names().end());
    }
  }
}

TEST_CASE("fast Heisenberg suites pass and are deterministic", "[verify]")
{
  const Scenario s = Scenario::load(scenario_path("heisenberg.json"));
  for (const char * name : {"heisenberg", "bracket", "convergence", "ballbox", "sup_holder"}) {
    const Report a = s.run_suite(name);
    INFO(name);
    CHECK(a.passed());
    CHECK(a.to_json(false) == s.run_suite(name).to_json(false));
    for (const auto & [k, v] : a.thresholds()) CHECK(s.thresholds().at(k) == v);
  }
  CHECK(s.run_suite("bracket").get("12.exact") == 1.0);
  CHECK(s.run_suite("ballbox").get("jacobian_ratio_max") == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("suites refuse to run without their thresholds", "[verify]")
{
  json j = minimal();
  j["suites"] = {{"bracket", json::object()}};
  const Scenario s = Scenario::from_json(j);
  CHECK_THROWS_AS(s.run_suite("bracket"), InputError);
}

TEST_CASE("bracket order on the step-3 frame", "[verify]")
{
  const CommutatorBasis b = step3();
  const auto pts = sample_points(Domain::cube(3, -1.0, 1.0), 5, 1, 2);
  const OrderFit fit = bracket_order(b, Word::parse("12"), {0.2, 0.1, 0.05, 0.025}, pts, IntegratorConfig{0.05, 1e-12, 1 << 16}, 1e-9);
  REQUIRE(fit.order);
  CHECK(*fit.order == Approx(3.0).margin(0.05));
}

TEST_CASE("convergence slope on a frame that is not nilpotent", "[verify]")
{
  json j = json::parse(R"json({
    "name": "sine",
    "dimension": 3,
    "generators": [["1", "0", "0"], ["0", "1", "sin(x1)"]],
    "step": 2,
    "domain": {"lo": [-1, -1, -1], "hi": [1, 1, 1]},
    "function": "x3",
    "integrator": {"h0": 0.01, "tol": 1e-12},
    "suites": {"convergence": {"words": ["12"], "point": [0.4, 0.1, 0.0]}},
    "thresholds": {"convergence.exact_factor": 10, "convergence.slope_slack": 0.2}
  })json");
  const Report r = Scenario::from_json(j).run_suite("convergence");
  CHECK(r.passed());
  CHECK(r.get("12.exact") == 0.0);
  CHECK(r.get("12.slope") == Approx(1.5).margin(0.2));
}
