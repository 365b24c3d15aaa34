// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any of criteria 1-7 fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "json.hpp"
#include "kred/network.hpp"
#include "kred/parse.hpp"
#include "kred/reduce.hpp"
#include "kred/simulate.hpp"
#include "kred/system.hpp"
#include "oracles.hpp"

using namespace kred;

namespace {

std::string fixture(const std::string& name) { return std::string(KRED_FIXTURE_DIR) + "/" + name; }

struct Outcome {
  bool pass = false;
  std::string detail;
};

char buf[512];

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// --------------------------------------------------------------- criterion 1

Outcome exact_equivalence() {
  constexpr int kSystems = 20;
  constexpr double kTol = 1e-12;
  std::mt19937_64 rng(20240521);
  ReductionConfig cfg;
  cfg.enable_dimer = false;
  cfg.enable_enzymatic = false;
  int checked = 0, tried = 0;
  double worst = 0.0;
  std::size_t largest = 0;
  while (checked < kSystems && tried < 500) {
    ++tried;
    KappaSystem sys = parse_model(oracle::random_exact_model(rng));
    auto [red, report] = reduce_all(sys, cfg);
    if (report.steps.empty()) continue;
    ReactionNetwork a = expand(sys), b = expand(red);
    oracle::Generator qa, qb, mapped;
    if (!oracle::generator(a, 10000, qa)) continue;
    if (!oracle::generator(b, 10000, qb)) return {false, "reduced state space exceeds 1e4"};
    if (!oracle::project(a, qa, b, mapped)) return {false, "an eliminated species is not constant"};
    worst = std::max(worst, oracle::generator_distance(mapped, qb));
    largest = std::max(largest, qa.size());
    ++checked;
  }
  return {checked == kSystems && worst <= kTol,
          fmt("%d systems, largest state space %zu, max entrywise difference %.3g (tol %.0e)", checked, largest, worst,
              kTol)};
}

// --------------------------------------------------------------- criterion 2

Outcome mm_scaling() {
  KappaSystem sys = load_model(fixture("mm.ka"));
  SimConfig cfg;
  cfg.t_end = 10.0;
  cfg.sample_grid = uniform_grid(cfg.t_end, 50);
  cfg.n_runs = 1000;
  cfg.seed = 2024;
  ScalingResult r = scaling_experiment(sys, {{1.0, 10.0, 100.0}}, cfg);
  bool ok = r.rows.size() == 3 && r.decreasing("P");
  std::string d = "P time-averaged D_B";
  for (const auto& row : r.rows) {
    const auto* o = row.comparison.find("P");
    ok = ok && o && o->early > o->late;
    d += fmt(" N=%g: %.4f (early %.4f, late %.4f);", row.factor, o->time_average, o->early, o->late);
  }
  d += ok ? " strictly decreasing, early > late" : " ordering violated";
  return {ok, d};
}

// --------------------------------------------------------------- criterion 3

Outcome dimer_identities() {
  constexpr double kTol = 1e-12;  // relative to max(1, M_T)
  double worst = 0.0;
  int points = 0;
  for (int i = 0; i < 10; ++i) {
    double K = std::pow(10.0, -3.0 + 6.0 * i / 9.0);
    for (int j = 0; j < 10; ++j) {
      double mt = std::pow(10.0, 6.0 * j / 9.0);
      auto [xm, xd] = dimer_partition(mt, K);
      double scale = std::max(1.0, mt);
      worst = std::max({worst, std::abs(xm + 2.0 * xd - mt) / scale, std::abs(K * xm * xm - xd) / scale});
      ++points;
    }
  }
  return {points == 100 && worst <= kTol,
          fmt("%d grid points K in [1e-3,1e3], M_T in [1,1e6], max residual %.3g (tol %.0e relative to max(1,M_T))",
              points, worst, kTol)};
}

// --------------------------------------------------------------- criterion 4

Outcome single_branch_degeneration() {
  constexpr double kTol = 1e-12;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> rate(0.05, 20.0);
  double k1 = rate(rng), k2 = rate(rng), k3 = rate(rng);
  int et = 1 + static_cast<int>(rng() % 9);
  std::string model = "%agent: E(s)\n%agent: S(e)\n%agent: P()\n%init: " + std::to_string(et) +
                      " E(s)\n%init: 100 S(e)\n%obs: P P()\n"
                      "bind: E(s),S(e) -> E(s!1),S(e!1) @ " + format_number(k1) + "\n" +
                      "unbind: E(s!1),S(e!1) -> E(s),S(e) @ " + format_number(k2) + "\n" +
                      "cat: E(s!1),S(e!1) -> E(s),P() @ " + format_number(k3) + "\n";
  KappaSystem sys = parse_model(model);
  KappaSystem red = generalized_enzymatic_reduce(sys, {}).system;
  ReactionNetwork net = expand(red);
  if (net.reactions.size() != 1 || net.reactions[0].kind != RateLaw::Kind::Closed) {
    return {false, "reduction did not produce a single closed-form rule"};
  }
  int s = net.find(Species(parse_expression("S(e)", red.signature), red.signature).key());
  double K = k1 / (k2 + k3);
  double worst = 0.0;
  std::uniform_int_distribution<std::int64_t> count(0, 100000);
  for (int i = 0; i < 100; ++i) {
    std::vector<std::int64_t> x = net.init;
    x[s] = count(rng);
    double xs = static_cast<double>(x[s]);
    double want = k3 * et * K * xs / (1.0 + K * xs);
    double got = net.closed_laws[net.reactions[0].closed](x);
    worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
  }
  return {worst <= kTol, fmt("100 random states, max relative difference %.3g (tol %.0e)", worst, kTol)};
}

// --------------------------------------------------------------- criterion 5

Outcome lambda_fixtures() {
  KappaSystem comp = load_model(fixture("lambda_competitive.ka"));
  auto [red, report] = reduce_all(comp);
  auto j = nlohmann::json::parse(report_json(report));
  std::map<std::string, double> constants;
  for (const auto& step : j["steps"]) {
    for (const auto& c : step["introduced_constants"]) constants[c["name"]] = c["value"];
  }
  double pre = static_cast<double>(comp.initial_count(
      Species(parse_expression("PRE(cii,rnap)", comp.signature), comp.signature)));
  bool ok = red.rules.size() == 1 && constants.size() == 3 && constants.count("E_T") && constants.count("K_a") &&
            constants.count("K_b") && constants["E_T"] == pre;
  std::string d = fmt("competitive: %zu rule(s), constants", red.rules.size());
  for (const auto& [name, v] : constants) d += " " + name + "=" + format_number(v);

  auto [red10, report10] = reduce_all(load_model(fixture("lambda_pre_cii_reconstructed.ka")));
  ok = ok && report10.rules_before == 10 && red10.rules.size() == 4 && red10.signature.agents().size() == 3;
  d += fmt("; reconstructed: %zu -> %zu rules, %zu -> %zu agents", report10.rules_before, red10.rules.size(),
           report10.agents_before, red10.signature.agents().size());
  return {ok, d};
}

// --------------------------------------------------------------- criterion 6

Outcome deterministic_limit() {
  constexpr double V = 1000.0;
  const double tol = 5.0 / std::sqrt(V);
  KappaSystem sys = parse_model(
      "%agent: A()\n%init: 2000 A()\n%obs: A A()\nbirth: . -> A() @ 10000\ndeath: A() -> . @ 1\n");
  ReactionNetwork net = expand(sys);
  SimConfig cfg;
  cfg.t_end = 5.0;
  cfg.sample_grid = uniform_grid(cfg.t_end, 51);
  cfg.n_runs = 1000;
  cfg.seed = 6;
  cfg.volume = V;
  EnsembleSummary ens = ensemble(net, cfg);
  std::vector<double> z0(net.init.size());
  for (std::size_t i = 0; i < z0.size(); ++i) z0[i] = static_cast<double>(net.init[i]) / V;
  OdeTrajectory ode = ode_solve(net, z0, cfg);
  double sup = 0.0, top = 0.0;
  for (std::size_t g = 0; g < cfg.sample_grid.size(); ++g) {
    double z = ode.states[g][0];
    sup = std::max(sup, std::abs(ens.observables[0].mean[g] / V - z));
    top = std::max(top, std::abs(z));
  }
  double rel = sup / top;
  return {rel <= tol, fmt("birth-death at V=1e3, 1000 runs: relative sup-norm %.3g (tol 5/sqrt(V) = %.3g)", rel, tol)};
}

// --------------------------------------------------------------- criterion 7

Outcome pure_death() {
  constexpr double k = 0.5;
  constexpr std::size_t runs = 10000;
  KappaSystem sys = parse_model("%agent: A()\n%init: 1 A()\n%obs: A A()\nd: A() -> . @ 0.5\n");
  ReactionNetwork net = expand(sys);
  SimConfig cfg;
  cfg.t_end = 4.0;
  cfg.sample_grid = {0.5, 1.0, 2.0, 3.0, 4.0};
  cfg.n_runs = runs;
  cfg.seed = 7;
  EnsembleSummary ens = ensemble(net, cfg);
  bool ok = true;
  double worst = 0.0;
  for (std::size_t g = 0; g < cfg.sample_grid.size(); ++g) {
    double p = 1.0 - std::exp(-k * cfg.sample_grid[g]);
    double sigma = std::sqrt(p * (1.0 - p) / runs);
    double z = std::abs(1.0 - ens.observables[0].mean[g] - p) / sigma;
    worst = std::max(worst, z);
    ok = ok && z <= 3.0;
  }
  return {ok, fmt("10^4 runs at t = 0.5,1,2,3,4: max |error| %.2f sigma (tol 3 sigma)", worst)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> check;
  };
  std::vector<Criterion> criteria = {
      {1, "exact reductions preserve the generator", 60.0, exact_equivalence},
      {2, "MM distance shrinks under scaling", 300.0, mm_scaling},
      {3, "dimer partition identities", 1.0, dimer_identities},
      {4, "single-branch enzymatic law", 1.0, single_branch_degeneration},
      {5, "lambda fixtures", 1.0, lambda_fixtures},
      {6, "deterministic limit", 120.0, deterministic_limit},
      {7, "SSA pure death", 30.0, pure_death},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = o.pass && secs < c.budget_s;
    if (!pass) ++failed;
    std::printf("criterion %d %s: %s: %s [%.2fs, budget %.0fs]\n", c.id, pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }
  std::printf(
      "criterion 8 NOT REPRODUCIBLE: full lambda-phage model (96 -> 11 rules, simulation speedup, lysogeny "
      "curves) is not available; covered by criteria 1-7 and the module test suites\n");
  return failed == 0 ? 0 : 1;
}
