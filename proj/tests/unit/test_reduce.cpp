#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "kred/network.hpp"
#include "kred/parse.hpp"
#include "kred/reduce.hpp"
#include "kred/system.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace kred {
namespace {

std::string fixture(const std::string& name) { return std::string(KRED_FIXTURE_DIR) + "/" + name; }

ReductionConfig exact_only() {
  ReductionConfig cfg;
  cfg.enable_dimer = false;
  cfg.enable_enzymatic = false;
  return cfg;
}

const Constant* constant(const KappaSystem& sys, const std::string& name) {
  for (const auto& c : sys.constants) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

// Propensity of the first reaction of `rule` at the initial state of `net`.
double rule_propensity(const ReactionNetwork& net, const std::string& rule) {
  for (const auto& rx : net.reactions) {
    if (rx.source_rule == rule) return propensity(rx, net, net.init);
  }
  ADD_FAILURE() << "no reaction from " << rule;
  return NAN;
}

// ---------------------------------------------------------------------- SRC

TEST(SimilarRuleComposition, SumsRates) {
  KappaSystem sys = parse_model("%agent: A()\n%agent: B()\n%init: 3 A()\nr1: A() -> B() @ 1\nr2: A() -> B() @ 2\n");
  PassResult out = similar_rule_composition(sys);
  ASSERT_EQ(out.system.rules.size(), 1u);
  EXPECT_DOUBLE_EQ(out.system.rules[0].rate.k, 3.0);
  EXPECT_EQ(out.system.rules[0].name, "r1");
  ASSERT_EQ(out.steps.size(), 1u);
  EXPECT_EQ(out.steps[0].removed_rules, std::vector<std::string>{"r2"});
}

TEST(SimilarRuleComposition, DifferentRightSidesKept) {
  KappaSystem sys =
      parse_model("%agent: A()\n%agent: B()\n%agent: C()\n%init: 3 A()\nr1: A() -> B() @ 1\nr2: A() -> C() @ 2\n");
  PassResult out = similar_rule_composition(sys);
  EXPECT_EQ(out.system.rules.size(), 2u);
  EXPECT_TRUE(out.steps.empty());
}

TEST(SimilarRuleComposition, ThreeCopies) {
  KappaSystem sys = parse_model(
      "%agent: A(x~u~p)\n%init: 3 A(x~u)\n"
      "a: A(x~u) -> A(x~p) @ 0.7\nb: A(x~u) -> A(x~p) @ 0.7\nc: A(x~u) -> A(x~p) @ 0.7\n");
  PassResult out = similar_rule_composition(sys);
  ASSERT_EQ(out.system.rules.size(), 1u);
  EXPECT_NEAR(out.system.rules[0].rate.k, 2.1, 1e-12);
}

TEST(SimilarRuleComposition, AlignmentMatters) {
  // Same sides as multisets, but B is created rather than kept.
  KappaSystem sys = parse_model(
      "%agent: A(x)\n%agent: B(y)\n%init: 3 A(x)\n%init: 3 B(y)\n"
      "r1: A(x),B(y) -> A(x),B(y) @ 1\nr2: A(x),B(y) -> A(x),.,B(y) @ 1\n");
  PassResult out = similar_rule_composition(sys);
  EXPECT_EQ(out.system.rules.size(), 2u);
}

// ----------------------------------------------------------------------- ME

TEST(ModifierElimination, FoldsInitialCount) {
  KappaSystem sys = parse_model(
      "%agent: E(s)\n%agent: S(e)\n%agent: P()\n%init: 5 E(s)\n%init: 20 S(e)\n%obs: P P()\n"
      "c: E(s),S(e) -> E(s),P() @ 0.3\n");
  PassResult out = modifier_elimination(sys);
  ASSERT_EQ(out.system.rules.size(), 1u);
  const Rule& r = out.system.rules[0];
  EXPECT_EQ(to_string(r.lhs), "S(e)");
  EXPECT_EQ(to_string(r.rhs), "P()");
  EXPECT_NEAR(r.rate.k, 1.5, 1e-12);
  ASSERT_EQ(out.steps.size(), 1u);
  EXPECT_EQ(out.steps[0].removed_species, std::vector<std::string>{"E(s)"});
  for (const auto& e : out.system.init) EXPECT_NE(to_string(e.species.expression()), "E(s)");
}

TEST(ModifierElimination, ZeroCountKillsRule) {
  KappaSystem sys = parse_model(
      "%agent: E(s)\n%agent: S(e)\n%agent: P()\n%agent: Q()\n%init: 20 S(e)\n%obs: P P()\n"
      "c: E(s),S(e) -> E(s),P() @ 0.3\nd: S(e) -> Q() @ 1\n");
  ASSERT_EQ(sys.initial_count(Species(parse_expression("E(s)", sys.signature), sys.signature)), 0);
  PassResult out = modifier_elimination(sys);
  ASSERT_EQ(out.system.rules.size(), 1u);
  EXPECT_EQ(out.system.rules[0].name, "d");
}

TEST(ModifierElimination, ObservedSpeciesKept) {
  KappaSystem sys = parse_model(
      "%agent: E(s)\n%agent: S(e)\n%agent: P()\n%init: 5 E(s)\n%obs: E E(s)\n"
      "c: E(s),S(e) -> E(s),P() @ 0.3\n");
  PassResult out = modifier_elimination(sys);
  EXPECT_TRUE(out.steps.empty());
  EXPECT_EQ(to_string(out.system.rules[0].lhs), "E(s),S(e)");
}

TEST(ModifierElimination, ReactantNotEliminated) {
  KappaSystem sys = parse_model(
      "%agent: E(s)\n%agent: S(e)\n%agent: P()\n%init: 5 E(s)\n%obs: P P()\n"
      "c: E(s),S(e) -> E(s),P() @ 0.3\nd: E(s) -> . @ 1\n");
  EXPECT_TRUE(modifier_elimination(sys).steps.empty());
}

// -------------------------------------------------------------- dimer

TEST(Dimer, DetectsFixture) {
  KappaSystem sys = load_model(fixture("dimer.ka"));
  auto c = detect_dimerization(sys);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].forward, "dimerize_fwd");
  EXPECT_EQ(c[0].backward, "dimerize_rev");
  // detailed balance of the expanded pair: a_f C(x,2) = a_b y
  ReactionNetwork net = expand(sys);
  double af = 0.0, ab = 0.0;
  for (const auto& rx : net.reactions) {
    if (rx.source_rule == "dimerize_fwd") af = rx.k;
    if (rx.source_rule == "dimerize_rev") ab = rx.k;
  }
  EXPECT_NEAR(c[0].K, af / (2.0 * ab), 1e-15);
}

TEST(Dimer, RejectedWhenDimerMadeElsewhere) {
  KappaSystem sys = parse_model(
      "%agent: M(b)\n%agent: P()\n%init: 20 M(b)\n%init: 2 P()\n%obs: P P()\n"
      "dimerize: M(b),M(b) <-> M(b!1),M(b!1) @ 0.5, 10\n"
      "make: P() -> M(b!1),M(b!1) @ 1\n");
  std::vector<std::string> notes;
  EXPECT_TRUE(detect_dimerization(sys, &notes).empty());
  EXPECT_FALSE(notes.empty());
}

TEST(Dimer, HeterodimerNotMatched) {
  KappaSystem sys = parse_model(
      "%agent: A(b)\n%agent: B(a)\n%init: 20 A(b)\n%init: 20 B(a)\n"
      "d: A(b),B(a) <-> A(b!1),B(a!1) @ 0.5, 10\n");
  EXPECT_TRUE(detect_dimerization(sys).empty());
}

TEST(Dimer, PartitionExamples) {
  auto [m0, d0] = dimer_partition(0.0, 2.0);
  EXPECT_EQ(m0, 0.0);
  EXPECT_EQ(d0, 0.0);
  auto [m, d] = dimer_partition(1.0, 1.0);
  EXPECT_NEAR(m, 0.5, 1e-15);
  EXPECT_NEAR(d, 0.25, 1e-15);
}

TEST(Dimer, PartitionIdentitiesOnLogGrid) {
  for (int i = 0; i <= 24; ++i) {
    double K = std::pow(10.0, -3.0 + 6.0 * i / 24.0);
    for (int j = 0; j <= 30; ++j) {
      double mt = j == 0 ? 0.0 : std::pow(10.0, -2.0 + 8.0 * (j - 1) / 29.0);
      auto [xm, xd] = dimer_partition(mt, K);
      // positive root of 2K x^2 + x - M_T = 0 by the quadratic formula
      double root = mt == 0.0 ? 0.0 : 2.0 * mt / (1.0 + std::sqrt(1.0 + 8.0 * K * mt));
      double scale = std::max(1.0, mt);
      EXPECT_NEAR(xm, root, 1e-12 * scale) << K << " " << mt;
      EXPECT_NEAR(xm + 2.0 * xd, mt, 1e-12 * scale);
      EXPECT_NEAR(K * xm * xm, xd, 1e-12 * scale);
      EXPECT_GE(xm, 0.0);
      EXPECT_GE(xd, 0.0);
    }
  }
}

TEST(Dimer, ReducePoolsMonomers) {
  KappaSystem sys = load_model(fixture("dimer.ka"));
  PassResult out = fast_dimerization_reduce(sys, {});
  ASSERT_EQ(out.system.rules.size(), 1u);
  const Rule& r = out.system.rules[0];
  EXPECT_TRUE(r.rate.is_closed());
  ASSERT_EQ(out.steps.size(), 1u);
  EXPECT_EQ(out.steps[0].removed_rules.size(), 2u);
  // the pool starts with every monomer
  ReactionNetwork net = expand(out.system);
  std::int64_t total = 0;
  for (auto v : net.init) total += v;
  EXPECT_EQ(total, 200);
  // propensity is k_p times the equilibrium dimer count
  double K = detect_dimerization(sys)[0].K;
  double mt = 200.0;
  double xm = (std::sqrt(8.0 * K * mt + 1.0) - 1.0) / (4.0 * K);
  double xd = mt / 2.0 - xm / 2.0;
  ReactionNetwork orig = expand(sys);
  double kp = 0.0;
  for (const auto& rx : orig.reactions) {
    if (rx.source_rule == "express") kp = rx.k;
  }
  EXPECT_NEAR(rule_propensity(net, r.name), kp * xd, 1e-9);
  // the monomer observable becomes a closed expression of the pool
  bool rewritten = false;
  for (const auto& o : out.system.observables) {
    if (o.name == "M") rewritten = o.closed;
  }
  EXPECT_TRUE(rewritten);
}

TEST(Dimer, NoOtherRuleJustRemovesPair) {
  KappaSystem sys = parse_model(
      "%agent: M(b)\n%agent: P()\n%init: 20 M(b)\n%init: 2 P()\n%obs: P P()\n"
      "dimerize: M(b),M(b) <-> M(b!1),M(b!1) @ 0.5, 10\n"
      "decay: P() -> . @ 1\n");
  PassResult out = fast_dimerization_reduce(sys, {});
  ASSERT_EQ(out.system.rules.size(), 1u);
  EXPECT_EQ(out.system.rules[0].name, "decay");
}

// --------------------------------------------------------------- enzymatic

TEST(Enzymatic, MichaelisMentenFixture) {
  KappaSystem sys = load_model(fixture("mm.ka"));
  auto groups = detect_enzymatic(sys, {});
  ASSERT_EQ(groups.size(), 1u);
  ASSERT_EQ(groups[0].branches.size(), 1u);
  EXPECT_EQ(groups[0].enzyme_total, 9);
  EXPECT_NEAR(groups[0].branches[0].K, 0.5, 1e-15);

  PassResult out = generalized_enzymatic_reduce(sys, {});
  ASSERT_EQ(out.system.rules.size(), 1u);
  EXPECT_EQ(out.system.rules[0].name, "convert_mm");
  ASSERT_NE(constant(out.system, "K_convert"), nullptr);
  EXPECT_DOUBLE_EQ(constant(out.system, "K_convert")->value, 0.5);
  EXPECT_DOUBLE_EQ(constant(out.system, "E_T")->value, 9.0);

  // single branch: k_cat E_T K x / (1 + K x)
  ReactionNetwork net = expand(out.system);
  double x = 10.0;
  EXPECT_NEAR(rule_propensity(net, "convert_mm"), 1.0 * 9.0 * 0.5 * x / (1.0 + 0.5 * x), 1e-12);
}

TEST(Enzymatic, SingleBranchIsMichaelisMentenEverywhere) {
  KappaSystem sys = parse_model(
      "%agent: E(s)\n%agent: S(e)\n%agent: P()\n%init: 2 E(s)\n%init: 40 S(e)\n%obs: P P()\n"
      "bind: E(s),S(e) <-> E(s!1),S(e!1) @ 3, 0.5\n"
      "cat: E(s!1),S(e!1) -> E(s),P() @ 0.25\n");
  PassResult out = generalized_enzymatic_reduce(sys, {});
  ASSERT_EQ(out.system.rules.size(), 1u);
  ReactionNetwork net = expand(out.system);
  double K = 3.0 / (0.5 + 0.25);
  for (std::int64_t s = 0; s <= 40; ++s) {
    std::vector<std::int64_t> x = net.init;
    for (std::size_t i = 0; i < net.species.size(); ++i) {
      if (to_string(net.species[i].expression()) == "S(e)") x[i] = s;
    }
    double a = propensity(net.reactions[0], net, x);
    EXPECT_NEAR(a, 0.25 * 2.0 * K * s / (1.0 + K * s), 1e-12);
  }
}

TEST(Enzymatic, LambdaCompetitive) {
  KappaSystem sys = load_model(fixture("lambda_competitive.ka"));
  auto groups = detect_enzymatic(sys, {});
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].branches.size(), 2u);
  auto [red, report] = reduce_all(sys);
  ASSERT_EQ(red.rules.size(), 1u);
  EXPECT_EQ(report.rules_before, 6u);
  EXPECT_EQ(report.rules_after, 1u);
  std::string rhs = to_string(red.rules[0].rhs);
  EXPECT_NE(rhs.find("10 CI(ci,or)"), std::string::npos) << rhs;
  EXPECT_TRUE(red.rules[0].rate.is_closed());
}

std::string two_branch_model() {
  return "%agent: E(s)\n%agent: S(e)\n%agent: T(e)\n%agent: P()\n%agent: Q()\n"
         "%init: 1 E(s)\n%init: 1 S(e)\n%init: 1 T(e)\n%obs: P P()\n%obs: Q Q()\n"
         "b1: E(s),S(e) <-> E(s!1),S(e!1) @ 2, 1\n"
         "c1: E(s!1),S(e!1) -> E(s),P() @ 1\n"
         "b2: E(s),T(e) <-> E(s!1),T(e!1) @ 4, 1\n"
         "c2: E(s!1),T(e!1) -> E(s),Q() @ 3\n";
}

TEST(Enzymatic, TwoBranchesCompete) {
  KappaSystem sys = parse_model(two_branch_model());
  auto groups = detect_enzymatic(sys, {});
  ASSERT_EQ(groups.size(), 1u);
  ASSERT_EQ(groups[0].branches.size(), 2u);
  EXPECT_NEAR(groups[0].branches[0].K, 1.0, 1e-15);
  EXPECT_NEAR(groups[0].branches[1].K, 1.0, 1e-15);
  PassResult out = generalized_enzymatic_reduce(sys, {});
  ASSERT_EQ(out.system.rules.size(), 2u);
  ReactionNetwork net = expand(out.system);
  EXPECT_NEAR(rule_propensity(net, "c1_mm"), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(rule_propensity(net, "c2_mm"), 3.0 / 3.0, 1e-12);
}

// The closed law matches k_cat times the steady-state complex of the full
// network with substrates held fixed.
TEST(Enzymatic, DenominatorMatchesQuasiSteadyState) {
  for (auto [s, t] : {std::pair{1.0, 1.0}, std::pair{3.0, 0.5}, std::pair{0.2, 7.0}}) {
    KappaSystem sys = parse_model(two_branch_model());
    ReactionNetwork full = expand(sys);
    auto idx = [&](const std::string& text) {
      return full.find(Species(parse_expression(text, sys.signature), sys.signature).key());
    };
    int e = idx("E(s)"), c1 = idx("E(s!1),S(e!1)"), c2 = idx("E(s!1),T(e!1)");
    int si = idx("S(e)"), ti = idx("T(e)");
    std::vector<double> z(full.species.size(), 0.0);
    z[e] = 1.0;
    z[si] = s;
    z[ti] = t;
    for (int step = 0; step < 400000; ++step) {
      auto dz = ode_rhs(full, z, 1.0);
      for (int i : {e, c1, c2}) z[i] += 1e-4 * dz[i];
    }
    double flux1 = 1.0 * z[c1];
    double flux2 = 3.0 * z[c2];

    PassResult out = generalized_enzymatic_reduce(sys, {});
    ReactionNetwork red = expand(out.system);
    std::vector<double> x(red.species.size(), 0.0);
    for (std::size_t i = 0; i < red.species.size(); ++i) {
      std::string name = to_string(red.species[i].expression());
      if (name == "S(e)") x[i] = s;
      if (name == "T(e)") x[i] = t;
    }
    for (const auto& rx : red.reactions) {
      double a = red.closed_laws.at(rx.closed)(x);
      double want = rx.source_rule == "c1_mm" ? flux1 : flux2;
      EXPECT_NEAR(a, want, 1e-9) << rx.source_rule << " s=" << s << " t=" << t;
    }
  }
}

TEST(Enzymatic, RejectedWhenEnzymeProduced) {
  KappaSystem sys = parse_model(
      "%agent: E(s)\n%agent: S(e)\n%agent: P()\n%init: 2 E(s)\n%init: 40 S(e)\n%obs: P P()\n"
      "bind: E(s),S(e) <-> E(s!1),S(e!1) @ 3, 0.5\n"
      "cat: E(s!1),S(e!1) -> E(s),P() @ 0.25\n"
      "make: P() -> P(),E(s) @ 0.01\n");
  std::vector<std::string> notes;
  EXPECT_TRUE(detect_enzymatic(sys, {}, &notes).empty());
  bool noted = std::any_of(notes.begin(), notes.end(),
                           [](const std::string& n) { return n.rfind("Enzymatic: E(s) rejected", 0) == 0; });
  EXPECT_TRUE(noted);
}

TEST(Enzymatic, ThresholdApplies) {
  KappaSystem sys = load_model(fixture("mm.ka"));
  ReductionConfig cfg;
  cfg.enzyme_copy_threshold = 9;
  EXPECT_TRUE(detect_enzymatic(sys, cfg).empty());
  cfg.enzyme_copy_threshold = 10;
  EXPECT_EQ(detect_enzymatic(sys, cfg).size(), 1u);
}

TEST(Enzymatic, ObservedEnzymeRejected) {
  KappaSystem sys = parse_model(
      "%agent: E(s)\n%agent: S(e)\n%agent: P()\n%init: 2 E(s)\n%init: 40 S(e)\n%obs: E E(s)\n"
      "bind: E(s),S(e) <-> E(s!1),S(e!1) @ 3, 0.5\n"
      "cat: E(s!1),S(e!1) -> E(s),P() @ 0.25\n");
  EXPECT_TRUE(detect_enzymatic(sys, {}).empty());
}

// --------------------------------------------------------------- reduce_all

TEST(ReduceAll, NothingToDo) {
  KappaSystem sys = parse_model(
      "%agent: A()\n%agent: B()\n%init: 5 A()\n%obs: A A()\n%obs: B B()\nf: A() -> B() @ 1\nr: B() -> A() @ 2\n");
  auto [red, report] = reduce_all(sys);
  EXPECT_TRUE(report.steps.empty());
  EXPECT_EQ(print_model(red), print_model(sys));
}

TEST(ReduceAll, ReconstructedLambdaSubnetwork) {
  auto [red, report] = reduce_all(load_model(fixture("lambda_pre_cii_reconstructed.ka")));
  EXPECT_EQ(report.rules_before, 10u);
  EXPECT_EQ(report.rules_after, 4u);
  EXPECT_EQ(report.agents_before, 5u);
  EXPECT_EQ(report.agents_after, 3u);
  EXPECT_EQ(red.rules.size(), 4u);
  EXPECT_EQ(red.signature.agents().size(), 3u);
}

TEST(ReduceAll, TranscriptionFactorFigure) {
  auto [red, report] = reduce_all(load_model(fixture("fig1_tf_operator.ka")));
  ASSERT_EQ(red.rules.size(), 1u);
  EXPECT_TRUE(red.rules[0].rate.is_closed());
  EXPECT_EQ(to_string(red.rules[0].rhs), "P()");
  EXPECT_FALSE(red.signature.contains("Op"));
}

TEST(ReduceAll, ReportSerializations) {
  auto [red, report] = reduce_all(load_model(fixture("mm.ka")));
  auto j = nlohmann::json::parse(report_json(report));
  EXPECT_EQ(j["rules_before"], 3);
  EXPECT_EQ(j["rules_after"], 1);
  ASSERT_FALSE(j["steps"].empty());
  bool k_found = false;
  for (const auto& step : j["steps"]) {
    for (const auto& c : step["introduced_constants"]) k_found |= c["name"] == "K_convert";
  }
  EXPECT_TRUE(k_found);
  std::string text = report_text(report);
  EXPECT_NE(text.find("rules: 3 -> 1"), std::string::npos) << text;
}

std::vector<std::string> fixtures() {
  return {"fig1_tf_operator.ka", "mm.ka", "dimer.ka", "lambda_competitive.ka", "lambda_pre_cii_reconstructed.ka"};
}

TEST(ReduceAll, Invariants) {
  for (const auto& name : fixtures()) {
    KappaSystem sys = load_model(fixture(name));
    auto [red, report] = reduce_all(sys);
    EXPECT_LE(report.rules_after, report.rules_before) << name;
    EXPECT_EQ(report.rules_after, red.rules.size());
    // observables survive, possibly as closed expressions
    ASSERT_EQ(red.observables.size(), sys.observables.size());
    for (std::size_t i = 0; i < sys.observables.size(); ++i) EXPECT_EQ(red.observables[i].name, sys.observables[i].name);
    // introduced constants are referenced by a rate law of the result
    std::set<std::string> used;
    for (const auto& r : red.rules) {
      std::vector<std::string> c;
      if (r.rate.is_closed()) collect_constants(r.rate.expr, c);
      used.insert(c.begin(), c.end());
    }
    for (const auto& o : red.observables) {
      std::vector<std::string> c;
      if (o.closed) collect_constants(o.expr, c);
      used.insert(c.begin(), c.end());
    }
    for (const auto& step : report.steps) {
      EXPECT_FALSE(step.justification.empty()) << name;
      for (const auto& c : step.introduced_constants) EXPECT_TRUE(used.count(c.name)) << name << " " << c.name;
    }
    // the result parses back
    EXPECT_EQ(print_model(parse_model(print_model(red))), print_model(red)) << name;
  }
}

TEST(ReduceAll, Idempotent) {
  for (const auto& name : fixtures()) {
    auto [once, r1] = reduce_all(load_model(fixture(name)));
    auto [twice, r2] = reduce_all(once);
    EXPECT_TRUE(r2.steps.empty()) << name;
    EXPECT_EQ(print_model(twice), print_model(once)) << name;
  }
}

std::multiset<std::string> rule_fingerprints(const KappaSystem& sys) {
  std::multiset<std::string> out;
  for (const auto& r : sys.rules) {
    char rate[32];
    std::snprintf(rate, sizeof rate, "%.9g", r.rate.k);
    out.insert(canonical_key(r.lhs) + " => " + canonical_key(r.rhs) + " @ " + rate);
  }
  return out;
}

TEST(ExactReductions, ConfluentUnderRulePermutation) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    KappaSystem sys = parse_model(oracle::random_exact_model(rng));
    auto base = rule_fingerprints(reduce_all(sys, exact_only()).first);
    for (int p = 0; p < 3; ++p) {
      KappaSystem perm = sys;
      std::shuffle(perm.rules.begin(), perm.rules.end(), rng);
      EXPECT_EQ(rule_fingerprints(reduce_all(perm, exact_only()).first), base) << print_model(sys);
    }
  }
}

TEST(ExactReductions, GeneratorUnchanged) {
  std::mt19937_64 rng(7);
  int reduced = 0;
  for (int trial = 0; trial < 30; ++trial) {
    KappaSystem sys = parse_model(oracle::random_exact_model(rng));
    auto [red, report] = reduce_all(sys, exact_only());
    ReactionNetwork a = expand(sys);
    ReactionNetwork b = expand(red);
    oracle::Generator qa, qb, mapped;
    ASSERT_TRUE(oracle::generator(a, 10000, qa));
    ASSERT_TRUE(oracle::generator(b, 10000, qb));
    ASSERT_TRUE(oracle::project(a, qa, b, mapped)) << print_model(sys);
    EXPECT_LE(oracle::generator_distance(mapped, qb), 1e-12) << print_model(sys) << "\n---\n" << print_model(red);
    if (!report.steps.empty()) ++reduced;
  }
  EXPECT_GE(reduced, 15);
}

}  // namespace
}  // namespace kred
