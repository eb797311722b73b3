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

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "carnot/carnot.hpp"

namespace fs = std::filesystem;
using namespace carnot;

namespace {

constexpr int kExitSchema = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitSuite = 3;

struct Options
{
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool force{false};
  int threads{1};
  std::optional<double> max_d;
  bool symmetric_t{false};

  std::string word;
  std::vector<double> point;
  std::vector<double> to;
  double t{0.0};
  std::vector<double> radii;
  std::size_t samples{100000};
  std::string estimator{"box"};
  double s{0.5};
  double p{2.0};
  std::string suite;
};

std::string format_point(const Point & x)
{
  std::string s = "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x[i]);
    s += buf;
  }
  return s + ")";
}

json point_json(const Point & x)
{
  json a = json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(x[i]);
  return a;
}

fs::path out_root(const Options & o)
{
  if (!o.out.empty()) return o.out;
  if (const char * env = std::getenv("CARNOT_LAB_OUT"); env && *env) return env;
  return "out";
}

Point require_point(const std::vector<double> & v, int n, const char * flag)
{
  if (static_cast<int>(v.size()) != n) {
    throw InputError(std::string(flag) + " needs " + std::to_string(n) + " comma-separated coordinates");
  }
  return make_point(v);
}

Word require_word(const Options & o, const CommutatorBasis & basis)
{
  if (o.word.empty()) throw InputError("--word is required");
  const Word w = Word::parse(o.word);
  for (int l : w.letters()) {
    if (l > basis.num_generators()) throw InputError("word letter outside 1.." + std::to_string(basis.num_generators()));
  }
  return w;
}

/// Runs one command into its output directory, reusing a cached report when the key matches.
class Runner
{
public:
  Runner(const Scenario & sc, const Options & o, fs::path dir, json key)
      : sc_(sc), o_(o), dir_(std::move(dir)), key_(std::move(key))
  {}

  /// @p compute returns the report; @p print writes the human summary.
  template<class Compute, class Print>
  int run(Compute && compute, Print && print)
  {
    const std::string key = hex64(fnv1a64(key_.dump()));
    const fs::path report = dir_ / "report.json";
    if (!o_.force && fs::exists(report) && fs::exists(dir_ / "cache_key")) {
      std::ifstream k(dir_ / "cache_key");
      std::string stored;
      std::getline(k, stored);
      if (stored == key) {
        std::ifstream in(report);
        const json j = json::parse(in);
        std::cerr << "cache hit: " << report.string() << "\n";
        print(j);
        return j.value("passed", true) ? 0 : kExitSuite;
      }
    }
    Report rep;
    try {
      rep = compute();
    } catch (const NumericalError & e) {
      json err;
      err["error"] = "numerical";
      err["message"] = e.what();
      err["scenario_hash"] = sc_.hash();
      err["command"] = key_;
      write_file_atomic(dir_ / "error.json", err.dump(2) + "\n");
      std::cerr << "numerical failure: " << e.what() << "\n";
      return kExitNumerical;
    }
    rep.metadata()["scenario"] = sc_.name();
    rep.metadata()["scenario_hash"] = sc_.hash();
    rep.metadata()["seed"] = sc_.context().seed;
    rep.metadata()["command"] = key_;
    const json j = rep.to_json(true);
    write_file_atomic(dir_ / "report.json", j.dump(2) + "\n");
    write_file_atomic(dir_ / "report.csv", rep.to_csv());
    if (!rep.strata().header.empty()) write_file_atomic(dir_ / "strata.csv", to_csv(rep.strata()));
    write_file_atomic(dir_ / "cache_key", key + "\n");
    std::error_code ec;
    fs::remove(dir_ / "error.json", ec);
    print(j);
    return rep.passed() ? 0 : kExitSuite;
  }

private:
  const Scenario & sc_;
  const Options & o_;
  fs::path dir_;
  json key_;
};

void print_values(const json & j)
{
  std::cout << j.at("suite").get<std::string>() << ": " << (j.at("passed").get<bool>() ? "PASS" : "FAIL") << "\n";
  for (const auto & [k, v] : j.at("values").items()) std::cout << "  " << k << " = " << v.dump() << "\n";
}

json base_key(const std::string & cmd, const Options & o)
{
  json k;
  k["command"] = cmd;
  k["max_d"] = o.max_d ? json(*o.max_d) : json(nullptr);
  k["symmetric_t"] = o.symmetric_t;
  return k;
}

int dispatch(const std::string & cmd, const Options & o)
{
  Scenario sc = Scenario::load(o.scenario);
  Context & ctx = sc.context();
  if (o.seed) ctx.seed = *o.seed;
  if (o.threads < 1) throw InputError("--threads must be >= 1");
  ctx.threads = o.threads;
  ctx.seminorm.threads = o.threads;
  ctx.directional.threads = o.threads;
  if (o.max_d) {
    if (!(*o.max_d > 0)) throw InputError("--max-d must be positive");
    ctx.seminorm.max_d = *o.max_d;
  }
  if (o.symmetric_t) ctx.directional.symmetric_t = true;
  const CommutatorBasis & basis = ctx.basis;
  const int n = basis.dim();
  const fs::path root = out_root(o) / sc.hash();
  json key = base_key(cmd, o);

  if (cmd == "bracket") {
    const Word w = require_word(o, basis);
    key["word"] = w.to_string();
    const VectorField X = commutator_field(basis.generators(), w);
    return Runner(sc, o, root / "bracket" / w.to_string(), key).run(
        [&] {
          Report r("bracket");
          r.metadata()["word"] = w.to_string();
          r.metadata()["field"] = X.to_string();
          r.set("length", w.length());
          return r;
        },
        [](const json & j) { std::cout << j.at("metadata").at("field").get<std::string>() << "\n"; });
  }

  if (cmd == "basis") {
    return Runner(sc, o, root / "basis", key).run(
        [&] {
          Report r("basis");
          r.set("size", basis.size());
          r.set("dimension", n);
          r.set("step", basis.step());
          json rows = json::array();
          r.strata() = Table{{"index", "word", "length", "field"}, {}};
          for (int j = 1; j <= basis.size(); ++j) {
            rows.push_back({{"index", j}, {"word", basis.word(j).to_string()}, {"field", basis.field(j).to_string()}});
            r.strata().rows.push_back({std::to_string(j), basis.word(j).to_string(), std::to_string(basis.length(j)),
                                       basis.field(j).to_string()});
          }
          r.metadata()["entries"] = rows;
          return r;
        },
        [](const json & j) {
          for (const auto & e : j.at("metadata").at("entries")) {
            std::cout << "Y" << e.at("index").get<int>() << "  " << e.at("word").get<std::string>() << "  "
                      << e.at("field").get<std::string>() << "\n";
          }
        });
  }

  if (cmd == "flow" || cmd == "approxexp") {
    const Word w = require_word(o, basis);
    const Point x = require_point(o.point, n, "--point");
    key["word"] = w.to_string();
    key["point"] = point_json(x);
    key["t"] = o.t;
    return Runner(sc, o, root / cmd / hex64(fnv1a64(key.dump())), key).run(
        [&] {
          Report r(cmd);
          const Point exact = flow(commutator_field(basis.generators(), w), x, o.t, ctx.integrator);
          r.metadata()["flow"] = point_json(exact);
          if (cmd == "approxexp") {
            const Point ap = approx_exp(basis.generators(), w, o.t, x, ctx.integrator);
            r.metadata()["approx_exp"] = point_json(ap);
            r.set("difference", (ap - exact).norm());
          }
          return r;
        },
        [&](const json & j) {
          const auto & m = j.at("metadata");
          const json & v = m.contains("approx_exp") ? m.at("approx_exp") : m.at("flow");
          Point y(n);
          for (int i = 0; i < n; ++i) y[i] = v.at(static_cast<std::size_t>(i)).get<double>();
          std::cout << format_point(y) << "\n";
        });
  }

  if (cmd == "ballbox") {
    const Point x = require_point(o.point, n, "--point");
    if (o.radii.empty()) throw InputError("--r is required");
    key["point"] = point_json(x);
    key["r"] = o.radii;
    return Runner(sc, o, root / "ballbox" / hex64(fnv1a64(key.dump())), key).run(
        [&] {
          Report r("ballbox");
          r.strata() = Table{{"r", "I", "lambda_I", "l_I", "volume_proxy", "annulus_lo", "annulus_hi"}, {}};
          for (double rad : o.radii) {
            const MultiIndex I = select_maximal(basis, x, rad);
            const RadiusInterval a = maximal_annulus(basis, I, x, ctx.constants);
            const std::string tag = ".r=" + detail::fmt_param(rad);
            r.set("lambda_I" + tag, lambda_I(basis, I, x));
            r.set("volume_proxy" + tag, volume_proxy(basis, x, rad));
            r.metadata()["I" + tag] = I.to_string();
            r.strata().rows.push_back({format_double(rad), I.to_string(), format_double(lambda_I(basis, I, x)),
                                       std::to_string(ell(basis, I)), format_double(volume_proxy(basis, x, rad)),
                                       format_double(a.lo), format_double(a.hi)});
          }
          return r;
        },
        [](const json & j) {
          for (const auto & [k, v] : j.at("metadata").items()) {
            if (k.rfind("I.", 0) == 0) std::cout << k << " = " << v.get<std::string>() << "\n";
          }
          print_values(j);
        });
  }

  if (cmd == "distance") {
    const Point x = require_point(o.point, n, "--point");
    const Point y = require_point(o.to, n, "--to");
    key["point"] = point_json(x);
    key["to"] = point_json(y);
    return Runner(sc, o, root / "distance" / hex64(fnv1a64(key.dump())), key).run(
        [&] {
          Report r("distance");
          DistanceConfig dc = ctx.distance;
          dc.threads = ctx.threads;
          const DistanceEstimate d = cc_distance_upper(basis, x, y, dc, ctx.seed);
          DistanceConfig rc = dc;
          rc.candidates.push_back(embed_horizontal(basis, d.witness));
          const DistanceEstimate rho = rho_distance_upper(basis, x, y, rc, ctx.seed);
          const BoxDistance b = box_distance(basis, x, y, ctx.constants, ctx.integrator);
          r.set("d", d.value);
          r.set("d_endpoint_error", d.endpoint_error);
          r.set("d_tolerance", d.tolerance);
          r.set("d_feasible_starts", d.feasible_starts);
          r.set("rho", rho.value);
          r.set("rho_endpoint_error", rho.endpoint_error);
          r.set("box_distance", b.value);
          r.metadata()["box_I"] = b.I.to_string();
          return r;
        },
        print_values);
  }

  if (cmd == "volume") {
    const Point x = require_point(o.point, n, "--point");
    if (o.radii.empty()) throw InputError("--r is required");
    key["point"] = point_json(x);
    key["r"] = o.radii;
    key["samples"] = o.samples;
    key["estimator"] = o.estimator;
    return Runner(sc, o, root / "volume" / hex64(fnv1a64(key.dump())), key).run(
        [&] {
          Report r("volume");
          r.strata() = Table{{"r", "proxy", "mc", "mc_stderr"}, {}};
          std::vector<double> proxy, mc;
          for (std::size_t k = 0; k < o.radii.size(); ++k) {
            const double rad = o.radii[k];
            const VolumeEstimate v = estimate_ball_volume(ctx, x, rad, o.samples, o.estimator, ctx.seed + k);
            proxy.push_back(volume_proxy(basis, x, rad));
            mc.push_back(v.value);
            r.strata().rows.push_back({format_double(rad), format_double(proxy.back()), format_double(v.value),
                                       format_double(v.stderr_)});
            r.set("mc.r=" + detail::fmt_param(rad), v.value);
            r.set("proxy.r=" + detail::fmt_param(rad), proxy.back());
          }
          if (o.radii.size() >= 2) {
            r.set("slope_proxy", loglog_slope(o.radii, proxy));
            if (std::all_of(mc.begin(), mc.end(), [](double v) { return v > 0; })) r.set("slope_mc", loglog_slope(o.radii, mc));
          }
          return r;
        },
        print_values);
  }

  if (cmd == "seminorm") {
    key["s"] = o.s;
    key["p"] = o.p;
    key["estimator"] = o.estimator;
    key["word"] = o.word;
    return Runner(sc, o, root / "seminorm" / hex64(fnv1a64(key.dump())), key).run(
        [&] {
          Report r("seminorm");
          SeminormConfig scfg = ctx.seminorm;
          scfg.seed = ctx.seed;
          SeminormResult res;
          if (o.estimator == "box") {
            res = seminorm_d(ctx.f, basis, ctx.omega, o.s, o.p, ctx.constants, BoxDistanceModel(basis, ctx.constants), scfg);
          } else if (o.estimator == "cc") {
            res = seminorm_d(ctx.f, basis, ctx.omega, o.s, o.p, ctx.constants, EstimatorDistanceModel(basis, ctx.distance), scfg);
          } else {
            throw InputError("--estimator must be box or cc");
          }
          const double fs_norm = folland_stein_rhs(ctx.f, basis.generators(), ctx.omega0, o.p, ctx.lp);
          r.set("seminorm_d", res.value);
          r.set("stderr", res.stderr_);
          r.set("truncated_mass_bound", res.truncated_mass_bound);
          r.set("far_mass", res.far_mass);
          r.set("folland_stein", fs_norm);
          r.set("ratio", fs_norm > 0 ? res.value / fs_norm : std::numeric_limits<double>::infinity());
          r.strata() = Table{{"stratum", "pairs", "mean_kernel", "stderr"}, {}};
          for (const auto & st : res.strata) {
            r.strata().rows.push_back(
                {std::to_string(st.stratum), std::to_string(st.pairs), format_double(st.mean_kernel), format_double(st.stderr_)});
          }
          if (!o.word.empty()) {
            const Word w = require_word(o, basis);
            DirectionalConfig dc = ctx.directional;
            dc.seed = ctx.seed;
            const DirectionalResult d = seminorm_dir(ctx.f, commutator_field(basis.generators(), w), ctx.omega,
                                                     o.s / w.length(), o.p, ctx.constants.r0, dc);
            r.set("seminorm_dir", d.value);
            r.set("seminorm_dir_stderr", d.stderr_);
            r.set("exit_fraction", d.exit_fraction);
          }
          return r;
        },
        print_values);
  }

  if (cmd == "verify") {
    std::vector<std::string> suites;
    if (o.suite == "all") {
      suites = sc.suites();
    } else {
      if (std::find(suite_names().begin(), suite_names().end(), o.suite) == suite_names().end()) {
        throw InputError("unknown suite '" + o.suite + "'");
      }
      suites = {o.suite};
    }
    if (suites.empty()) {
      std::cerr << "warning: scenario selects no suites; nothing to do\n";
      return 0;
    }
    int code = 0;
    for (const auto & name : suites) {
      json k = key;
      k["suite"] = name;
      const int rc = Runner(sc, o, root / "verify" / name, k).run([&] { return sc.run_suite(name); }, print_values);
      if (rc == kExitNumerical) return rc;
      if (rc != 0) code = rc;
    }
    return code;
  }

  if (cmd == "report") {
    Report summary("summary");
    Table t{{"command", "suite", "passed"}, {}};
    bool all = true;
    if (fs::exists(root)) {
      std::vector<fs::path> files;
      for (const auto & e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file() && e.path().filename() == "report.json" && e.path().parent_path() != root) {
          files.push_back(e.path());
        }
      }
      std::sort(files.begin(), files.end());
      for (const auto & f : files) {
        std::ifstream in(f);
        const json j = json::parse(in);
        const bool pass = j.value("passed", true);
        all = all && pass;
        t.rows.push_back({fs::relative(f.parent_path(), root).generic_string(), j.value("suite", ""), pass ? "1" : "0"});
      }
    }
    summary.set_passed(all);
    summary.set("reports", static_cast<double>(t.rows.size()));
    summary.metadata()["scenario"] = sc.name();
    summary.metadata()["scenario_hash"] = sc.hash();
    write_file_atomic(root / "summary.json", summary.to_json(true).dump(2) + "\n");
    write_file_atomic(root / "summary.csv", to_csv(t));
    for (const auto & row : t.rows) std::cout << (row[2] == "1" ? "PASS  " : "FAIL  ") << row[0] << "\n";
    return all ? 0 : kExitSuite;
  }

  throw InputError("unknown command '" + cmd + "'");
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"carnot_lab: numerical experiments on Hormander vector fields"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;
  double max_d = 0.0;

  auto common = [&](CLI::App * c) {
    c->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
    c->add_option("--out", o.out, "Output directory (default: $CARNOT_LAB_OUT or ./out)");
    c->add_option("--seed", seed, "Override the scenario seed");
    c->add_flag("--force", o.force, "Recompute even when a cached report exists");
    c->add_option("--threads", o.threads, "Worker threads");
    c->add_option("--max-d", max_d, "Outer shell radius of the metric seminorm");
    c->add_flag("--symmetric-t", o.symmetric_t, "Directional seminorm over t in [-r0, r0]");
  };
  auto word = [&](CLI::App * c, bool required) {
    auto * opt = c->add_option("--word", o.word, "Commutator word, e.g. 12");
    if (required) opt->required();
  };
  auto point = [&](CLI::App * c, const char * name, std::vector<double> & v) {
    c->add_option(name, v, "Comma-separated coordinates")->delimiter(',')->required()->allow_extra_args(false);
  };

  auto * bracket = app.add_subcommand("bracket", "Print the symbolic commutator X_w");
  common(bracket);
  word(bracket, true);
  auto * basis = app.add_subcommand("basis", "List the commutator family Y_1..Y_q");
  common(basis);
  auto * flowc = app.add_subcommand("flow", "Integrate the flow of X_w");
  common(flowc);
  word(flowc, true);
  point(flowc, "--point", o.point);
  flowc->add_option("--t", o.t, "Time")->required();
  auto * apx = app.add_subcommand("approxexp", "Approximate exponential of t X_w");
  common(apx);
  word(apx, true);
  point(apx, "--point", o.point);
  apx->add_option("--t", o.t, "Time")->required();
  auto * bb = app.add_subcommand("ballbox", "Maximal multi-index, determinant and volume proxy");
  common(bb);
  point(bb, "--point", o.point);
  bb->add_option("--r", o.radii, "Radii")->delimiter(',')->required();
  auto * dist = app.add_subcommand("distance", "Distance estimates between two points");
  common(dist);
  point(dist, "--point", o.point);
  point(dist, "--to", o.to);
  auto * vol = app.add_subcommand("volume", "Monte Carlo ball volumes against the proxy");
  common(vol);
  point(vol, "--point", o.point);
  vol->add_option("--r", o.radii, "Radii")->delimiter(',')->required();
  vol->add_option("--samples", o.samples, "Samples per radius");
  vol->add_option("--estimator", o.estimator, "box or cc")->check(CLI::IsMember({"box", "cc"}));
  auto * semi = app.add_subcommand("seminorm", "Metric fractional seminorm of the scenario function");
  common(semi);
  semi->add_option("--s", o.s, "Smoothness in (0,1)");
  semi->add_option("--p", o.p, "Exponent >= 1");
  semi->add_option("--estimator", o.estimator, "box or cc")->check(CLI::IsMember({"box", "cc"}));
  word(semi, false);
  auto * ver = app.add_subcommand("verify", "Run a verification suite");
  common(ver);
  ver->add_option("suite", o.suite, "Suite name or 'all'")->required();
  auto * rep = app.add_subcommand("report", "Summarize the reports written for a scenario");
  common(rep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return kExitSchema;
  }

  for (auto * sub : app.get_subcommands()) {
    if (sub->count("--seed")) o.seed = seed;
    if (sub->count("--max-d")) o.max_d = max_d;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    return dispatch(cmd, o);
  } catch (const InputError & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const NumericalError & e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
