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
 * @brief Scenario files: JSON describing a frame, domains, a test function, numerical settings,
 * suite parameters and pass/fail thresholds.
 */

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "carnot/errors.hpp"
#include "carnot/report.hpp"
#include "carnot/verify.hpp"

namespace carnot {

/// Scenario file violates the schema.
class SchemaError : public InputError
{
public:
  using InputError::InputError;
};

namespace detail {

inline void check_keys(const json & obj, const std::string & where, const std::set<std::string> & allowed)
{
  if (!obj.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto & [k, v] : obj.items()) {
    if (!allowed.count(k)) throw SchemaError(where + ": unknown key '" + k + "'");
  }
}


template<class T>
void read_opt(const json & obj, const std::string & key, const std::string & where, T & out)
{
  if (!obj.contains(key)) return;
  const auto & v = obj.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw SchemaError(where + "." + key + ": expected a boolean");
    out = v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw SchemaError(where + "." + key + ": expected a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) throw SchemaError(where + "." + key + ": expected an integer");
    if (std::is_unsigned_v<T> && v.get<long long>() < 0) throw SchemaError(where + "." + key + ": must be non-negative");
    out = v.get<T>();
  } else {
    if (!v.is_number()) throw SchemaError(where + "." + key + ": expected a number");
    out = v.get<T>();
  }
}

inline std::vector<double> number_list(const json & v, const std::string & where)
{
  if (!v.is_array() || v.empty()) throw SchemaError(where + ": expected a non-empty array of numbers");
  std::vector<double> out;
  for (const auto & e : v) {
    if (!e.is_number()) throw SchemaError(where + ": expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

inline Point point_of(const json & v, int n, const std::string & where)
{
  const auto xs = number_list(v, where);
  if (static_cast<int>(xs.size()) != n) throw SchemaError(where + ": expected " + std::to_string(n) + " coordinates");
  return make_point(xs);
}

inline Domain domain_of(const json & v, int n, const std::string & where)
{
  check_keys(v, where, {"lo", "hi"});
  if (!v.contains("lo") || !v.contains("hi")) throw SchemaError(where + ": needs lo and hi");
  const Point lo = point_of(v.at("lo"), n, where + ".lo");
  const Point hi = point_of(v.at("hi"), n, where + ".hi");
  try {
    return Domain(lo, hi);
  } catch (const InputError & e) {
    throw SchemaError(where + ": " + e.what());
  }
}

inline std::vector<Word> word_list(const json & v, const std::string & where)
{
  if (!v.is_array()) throw SchemaError(where + ": expected an array of words");
  std::vector<Word> out;
  for (const auto & e : v) {
    if (!e.is_string()) throw SchemaError(where + ": expected strings");
    out.push_back(Word::parse(e.get<std::string>()));
  }
  return out;
}

}  // namespace detail

/// Names accepted by run_suite, in the order "verify all" runs them.
inline const std::vector<std::string> & suite_names()
{
  static const std::vector<std::string> names{"heisenberg", "bracket",   "convergence", "ballbox",   "volume",   "holder",
                                              "anisotropic", "directional", "sup_holder", "distance", "euclidean", "equivalence"};
  return names;
}

class Scenario
{
public:
  /// Parses and validates; throws SchemaError (or ParseError for expressions).
  static Scenario from_json(const json & j)
  {
    Scenario s;
    s.raw_ = j;
    detail::check_keys(j, "scenario",
                       {"$schema", "name", "description", "dimension", "generators", "step", "prune", "domain", "domain0",
                        "domain2", "domain3", "function", "seed", "constants", "integrator", "distance", "seminorm",
                        "directional", "lp", "suites", "thresholds"});
    for (const char * req : {"name", "dimension", "generators", "step", "domain", "function"}) {
      if (!j.contains(req)) throw SchemaError(std::string("scenario: missing '") + req + "'");
    }
    detail::read_opt(j, "name", "scenario", s.name_);
    int n = 0;
    detail::read_opt(j, "dimension", "scenario", n);
    if (n < 1 || n > kMaxDim) throw SchemaError("scenario.dimension must lie in 1.." + std::to_string(kMaxDim));
    const auto & gens = j.at("generators");
    if (!gens.is_array() || gens.empty()) throw SchemaError("scenario.generators: expected a non-empty array");
    std::vector<VectorField> fields;
    for (const auto & g : gens) {
      if (!g.is_array()) throw SchemaError("scenario.generators: each generator is an array of coefficient strings");
      std::vector<std::string> coeffs;
      for (const auto & c : g) {
        if (!c.is_string()) throw SchemaError("scenario.generators: coefficients must be strings");
        coeffs.push_back(c.get<std::string>());
      }
      if (static_cast<int>(coeffs.size()) != n) throw SchemaError("scenario.generators: each generator needs n coefficients");
      fields.push_back(VectorField::parse(coeffs));
    }
    int step = 0;
    bool prune = true;
    detail::read_opt(j, "step", "scenario", step);
    detail::read_opt(j, "prune", "scenario", prune);
    if (step < 1) throw SchemaError("scenario.step must be >= 1");
    Context & c = s.ctx_;
    c.basis = enumerate_basis(fields, step, prune);
    std::string fexpr;
    detail::read_opt(j, "function", "scenario", fexpr);
    c.f = parse_expr(fexpr, n);
    c.omega = detail::domain_of(j.at("domain"), n, "scenario.domain");
    c.omega0 = j.contains("domain0") ? detail::domain_of(j.at("domain0"), n, "scenario.domain0") : c.omega;
    if (!c.omega0.contains(c.omega)) throw SchemaError("scenario.domain0 must contain domain");
    if (j.contains("domain2")) c.omega2 = detail::domain_of(j.at("domain2"), n, "scenario.domain2");
    if (j.contains("domain3")) c.omega3 = detail::domain_of(j.at("domain3"), n, "scenario.domain3");
    if (c.omega2 && !c.omega2->contains(c.omega)) throw SchemaError("scenario.domain2 must contain domain");
    if (c.omega3 && (!c.omega2 || !c.omega3->contains(*c.omega2))) {
      throw SchemaError("scenario.domain3 must contain domain2");
    }
    detail::read_opt(j, "seed", "scenario", c.seed);
    if (j.contains("constants")) {
      const auto & o = j.at("constants");
      detail::check_keys(o, "scenario.constants", {"eta", "eps_hat", "C_hat", "r0"});
      detail::read_opt(o, "eta", "constants", c.constants.eta);
      detail::read_opt(o, "eps_hat", "constants", c.constants.eps_hat);
      detail::read_opt(o, "C_hat", "constants", c.constants.C_hat);
      detail::read_opt(o, "r0", "constants", c.constants.r0);
    }
    try {
      c.constants.validate();
    } catch (const InputError & e) {
      throw SchemaError(std::string("scenario.constants: ") + e.what());
    }
    c.integrator = IntegratorConfig{0.05, 1e-10, 65536};
    if (j.contains("integrator")) {
      const auto & o = j.at("integrator");
      detail::check_keys(o, "scenario.integrator", {"h0", "tol", "max_substeps"});
      detail::read_opt(o, "h0", "integrator", c.integrator.h0);
      detail::read_opt(o, "tol", "integrator", c.integrator.tol);
      detail::read_opt(o, "max_substeps", "integrator", c.integrator.max_substeps);
    }
    if (!(c.integrator.h0 > 0) || !(c.integrator.tol > 0) || c.integrator.max_substeps < 1) {
      throw SchemaError("scenario.integrator: h0, tol and max_substeps must be positive");
    }
    if (j.contains("distance")) {
      const auto & o = j.at("distance");
      detail::check_keys(o, "scenario.distance", {"segments", "starts", "tol", "r_max", "rel_precision", "max_iterations"});
      detail::read_opt(o, "segments", "distance", c.distance.segments);
      detail::read_opt(o, "starts", "distance", c.distance.starts);
      detail::read_opt(o, "tol", "distance", c.distance.tol);
      detail::read_opt(o, "r_max", "distance", c.distance.r_max);
      detail::read_opt(o, "rel_precision", "distance", c.distance.rel_precision);
      detail::read_opt(o, "max_iterations", "distance", c.distance.max_iterations);
    }
    if (c.distance.segments < 1 || c.distance.starts < 1 || !(c.distance.tol > 0)) {
      throw SchemaError("scenario.distance: segments, starts and tol must be positive");
    }
    if (j.contains("seminorm")) {
      const auto & o = j.at("seminorm");
      detail::check_keys(o, "scenario.seminorm", {"pairs", "k_max", "max_d", "far_pairs", "max_resample"});
      detail::read_opt(o, "pairs", "seminorm", c.seminorm.pairs);
      detail::read_opt(o, "k_max", "seminorm", c.seminorm.k_max);
      detail::read_opt(o, "max_d", "seminorm", c.seminorm.max_d);
      detail::read_opt(o, "far_pairs", "seminorm", c.seminorm.far_pairs);
      detail::read_opt(o, "max_resample", "seminorm", c.seminorm.max_resample);
    }
    if (j.contains("directional")) {
      const auto & o = j.at("directional");
      detail::check_keys(o, "scenario.directional",
                         {"x_samples", "t_levels", "t_nodes", "symmetric_t", "restrict_to_domain", "tail_correction"});
      detail::read_opt(o, "x_samples", "directional", c.directional.x_samples);
      detail::read_opt(o, "t_levels", "directional", c.directional.t_levels);
      detail::read_opt(o, "t_nodes", "directional", c.directional.t_nodes);
      detail::read_opt(o, "symmetric_t", "directional", c.directional.symmetric_t);
      detail::read_opt(o, "restrict_to_domain", "directional", c.directional.restrict_to_domain);
      detail::read_opt(o, "tail_correction", "directional", c.directional.tail_correction);
    }
    if (j.contains("lp")) {
      const auto & o = j.at("lp");
      detail::check_keys(o, "scenario.lp", {"grid", "monte_carlo", "samples"});
      detail::read_opt(o, "grid", "lp", c.lp.grid);
      detail::read_opt(o, "monte_carlo", "lp", c.lp.monte_carlo);
      detail::read_opt(o, "samples", "lp", c.lp.samples);
    }
    if (j.contains("suites")) {
      const auto & o = j.at("suites");
      if (!o.is_object()) throw SchemaError("scenario.suites: expected an object keyed by suite name");
      for (const auto & [k, v] : o.items()) {
        if (std::find(suite_names().begin(), suite_names().end(), k) == suite_names().end()) {
          throw SchemaError("scenario.suites: unknown suite '" + k + "'");
        }
        if (!v.is_object()) throw SchemaError("scenario.suites." + k + ": expected an object");
        s.suites_.push_back(k);
      }
    }
    if (j.contains("thresholds")) {
      const auto & o = j.at("thresholds");
      if (!o.is_object()) throw SchemaError("scenario.thresholds: expected an object");
      for (const auto & [k, v] : o.items()) {
        if (!v.is_number()) throw SchemaError("scenario.thresholds." + k + ": expected a number");
        s.thresholds_.set(k, v.get<double>());
      }
    }
    // Parse every suite block now, so schema errors surface before any computation.
    for (const auto & name : s.suites_) s.check_suite(name);
    return s;
  }

  static Scenario load(const std::string & path)
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot read scenario file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    json j;
    try {
      j = json::parse(ss.str());
    } catch (const json::parse_error & e) {
      throw SchemaError(std::string("scenario is not valid JSON: ") + e.what());
    }
    return from_json(j);
  }

  const std::string & name() const { return name_; }
  const json & raw() const { return raw_; }
  const Context & context() const { return ctx_; }
  Context & context() { return ctx_; }
  const CommutatorBasis & basis() const { return ctx_.basis; }
  const Thresholds & thresholds() const { return thresholds_; }
  /// Suites listed in the file, in file order.
  const std::vector<std::string> & suites() const { return suites_; }

  /// FNV-1a of the key-sorted JSON, with the effective seed folded in.
  std::string hash() const
  {
    nlohmann::json canon = nlohmann::json::parse(raw_.dump());
    canon["seed"] = ctx_.seed;
    return hex64(fnv1a64(canon.dump()));
  }

  /// Parameters block for @p suite; empty object when the file lists none.
  json suite_block(const std::string & suite) const
  {
    if (raw_.contains("suites") && raw_.at("suites").contains(suite)) return raw_.at("suites").at(suite);
    return json::object();
  }

  Report run_suite(const std::string & name) const
  {
    const json b = suite_block(name);
    const std::string where = "scenario.suites." + name;
    const Context & c = ctx_;
    const int n = c.basis.dim();
    auto points = [&](std::size_t default_count, std::uint64_t stream) {
      if (b.contains("points")) {
        const auto & v = b.at("points");
        if (!v.is_array() || v.empty()) throw SchemaError(where + ".points: expected a non-empty array of points");
        std::vector<Point> out;
        for (const auto & p : v) out.push_back(detail::point_of(p, n, where + ".points"));
        return out;
      }
      std::size_t count = default_count;
      detail::read_opt(b, "point_count", where, count);
      return sample_points(c.omega, count, c.seed, stream);
    };
    auto list = [&](const char * key, std::vector<double> & out) {
      if (b.contains(key)) out = detail::number_list(b.at(key), where + "." + key);
    };
    auto word = [&](const char * key, Word & out) {
      std::string w;
      detail::read_opt(b, key, where, w);
      if (!w.empty()) out = Word::parse(w);
    };
    auto all_words_of_length = [&](int len) {
      std::vector<Word> out;
      for (const auto & e : c.basis.entries()) {
        if (e.word.length() == len) out.push_back(e.word);
      }
      return out;
    };

    if (name == "heisenberg") {
      detail::check_keys(b, where, {"word", "s_grid", "points", "point_count"});
      IdentityParams p;
      word("word", p.word);
      list("s_grid", p.s_grid);
      p.points = points(20, 0x1d);
      return verify_heisenberg_identity(c, p, thresholds_);
    }
    if (name == "bracket") {
      detail::check_keys(b, where, {"words", "tau_grid", "points", "point_count"});
      BracketOrderParams p;
      p.words = b.contains("words") ? detail::word_list(b.at("words"), where + ".words") : all_words_of_length(2);
      list("tau_grid", p.tau_grid);
      p.points = points(10, 0xb7);
      return verify_bracket_order(c, p, thresholds_);
    }
    if (name == "convergence") {
      detail::check_keys(b, where, {"words", "t_grid", "point"});
      ConvergenceParams p;
      if (b.contains("words")) {
        p.words = detail::word_list(b.at("words"), where + ".words");
      } else {
        for (const auto & e : c.basis.entries()) p.words.push_back(e.word);
      }
      list("t_grid", p.t_grid);
      p.point = b.contains("point") ? detail::point_of(b.at("point"), n, where + ".point") : c.omega.lo + 0.5 * (c.omega.hi - c.omega.lo);
      return verify_convergence(c, p, thresholds_);
    }
    if (name == "ballbox") {
      detail::check_keys(b, where, {"points", "point_count", "r_grid", "samples", "path_segments"});
      BallboxParams p;
      p.points = points(4, 0xbb);
      list("r_grid", p.r_grid);
      detail::read_opt(b, "samples", where, p.samples);
      detail::read_opt(b, "path_segments", where, p.path_segments);
      return verify_ballbox(c, p, thresholds_);
    }
    if (name == "volume") {
      detail::check_keys(b, where, {"points", "point_count", "r_grid", "samples", "estimator"});
      VolumeParams p;
      p.points = points(1, 0x70);
      list("r_grid", p.r_grid);
      detail::read_opt(b, "samples", where, p.samples);
      detail::read_opt(b, "estimator", where, p.estimator);
      return verify_volume(c, p, thresholds_);
    }
    if (name == "holder") {
      detail::check_keys(b, where, {"pairs", "segments", "kappa"});
      HolderParams p;
      p.kappa = c.basis.step();
      detail::read_opt(b, "pairs", where, p.pairs);
      detail::read_opt(b, "segments", where, p.segments);
      detail::read_opt(b, "kappa", where, p.kappa);
      return verify_holder(c, p, thresholds_);
    }
    if (name == "anisotropic") {
      detail::check_keys(b, where, {"s", "p", "pairs", "doublings"});
      AnisotropicParams p;
      list("s", p.s_list);
      list("p", p.p_list);
      detail::read_opt(b, "pairs", where, p.base_pairs);
      detail::read_opt(b, "doublings", where, p.doublings);
      return verify_anisotropic(c, p, thresholds_);
    }
    if (name == "directional") {
      detail::check_keys(b, where, {"word", "s", "p", "x_samples", "doublings"});
      DirectionalParams p;
      word("word", p.word);
      detail::read_opt(b, "s", where, p.s);
      detail::read_opt(b, "p", where, p.p);
      detail::read_opt(b, "x_samples", where, p.base_samples);
      detail::read_opt(b, "doublings", where, p.doublings);
      return verify_directional(c, p, thresholds_);
    }
    if (name == "sup_holder") {
      detail::check_keys(b, where, {"word", "x_samples", "tau_levels", "grid"});
      SupHolderParams p;
      word("word", p.word);
      detail::read_opt(b, "x_samples", where, p.x_samples);
      detail::read_opt(b, "tau_levels", where, p.tau_levels);
      detail::read_opt(b, "grid", where, p.grid);
      if (p.grid < 2) throw SchemaError(where + ".grid must be >= 2");
      return verify_sup_holder(c, p, thresholds_);
    }
    if (name == "distance") {
      detail::check_keys(b, where, {"pairs", "pair_radius", "box_samples", "box_r"});
      DistanceSuiteParams p;
      detail::read_opt(b, "pairs", where, p.pairs);
      detail::read_opt(b, "pair_radius", where, p.pair_radius);
      detail::read_opt(b, "box_samples", where, p.box_samples);
      detail::read_opt(b, "box_r", where, p.box_r);
      return verify_distance(c, p, thresholds_);
    }
    if (name == "euclidean") {
      detail::check_keys(b, where, {"s", "p", "pairs", "gagliardo_pairs"});
      EuclideanParams p;
      detail::read_opt(b, "s", where, p.s);
      detail::read_opt(b, "p", where, p.p);
      detail::read_opt(b, "pairs", where, p.pairs);
      detail::read_opt(b, "gagliardo_pairs", where, p.gagliardo_pairs);
      return verify_euclidean(c, p, thresholds_);
    }
    if (name == "equivalence") {
      detail::check_keys(b, where, {"s", "p", "pairs", "x_samples", "doublings"});
      EquivalenceParams p;
      detail::read_opt(b, "s", where, p.s);
      detail::read_opt(b, "p", where, p.p);
      detail::read_opt(b, "pairs", where, p.base_pairs);
      detail::read_opt(b, "x_samples", where, p.base_x_samples);
      detail::read_opt(b, "doublings", where, p.doublings);
      return verify_equivalence(c, p, thresholds_);
    }
    throw InputError("unknown suite '" + name + "'");
  }

private:
  // Key and type checks of a suite block without running it.
  void check_suite(const std::string & name) const
  {
    static const std::map<std::string, std::set<std::string>> keys{
        {"heisenberg", {"word", "s_grid", "points", "point_count"}},
        {"bracket", {"words", "tau_grid", "points", "point_count"}},
        {"convergence", {"words", "t_grid", "point"}},
        {"ballbox", {"points", "point_count", "r_grid", "samples", "path_segments"}},
        {"volume", {"points", "point_count", "r_grid", "samples", "estimator"}},
        {"holder", {"pairs", "segments", "kappa"}},
        {"anisotropic", {"s", "p", "pairs", "doublings"}},
        {"directional", {"word", "s", "p", "x_samples", "doublings"}},
        {"sup_holder", {"word", "x_samples", "tau_levels", "grid"}},
        {"distance", {"pairs", "pair_radius", "box_samples", "box_r"}},
        {"euclidean", {"s", "p", "pairs", "gagliardo_pairs"}},
        {"equivalence", {"s", "p", "pairs", "x_samples", "doublings"}},
    };
    const json b = suite_block(name);
    detail::check_keys(b, "scenario.suites." + name, keys.at(name));
    const int m = ctx_.basis.num_generators();
    auto check_word = [&](const std::string & w) {
      const Word parsed = Word::parse(w);
      for (int l : parsed.letters()) {
        if (l > m) throw SchemaError("scenario.suites." + name + ": word '" + w + "' uses a letter outside 1.." + std::to_string(m));
      }
    };
    if (b.contains("word")) {
      if (!b.at("word").is_string()) throw SchemaError("scenario.suites." + name + ".word: expected a string");
      check_word(b.at("word").get<std::string>());
    }
    if (b.contains("words")) {
      for (const auto & w : detail::word_list(b.at("words"), "scenario.suites." + name + ".words")) check_word(w.to_string());
    }
    if (name == "equivalence" && (!ctx_.omega2 || !ctx_.omega3)) {
      throw SchemaError("scenario.suites.equivalence needs domain2 and domain3");
    }
  }

  std::string name_;
  json raw_;
  Context ctx_;
  Thresholds thresholds_;
  std::vector<std::string> suites_;
};

}  // namespace carnot
