#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "kred/system.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fixture(const std::string& name) { return std::string(KRED_FIXTURE_DIR) + "/" + name; }

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = kred::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class TempDir {
 public:
  TempDir() {
    static int n = 0;
    path_ = fs::temp_directory_path() /
            ("kred_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             std::to_string(::getpid()) + "_" + std::to_string(n++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string file(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return (path_ / name).string();
  }

 private:
  fs::path path_;
};

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// ----------------------------------------------------------------- validate

TEST(Validate, TranscriptionFactorModel) {
  Result r = run({"validate", fixture("fig1_tf_operator.ka")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("valid, 3 agents, 3 rules, 1 observables"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("binding"), std::string::npos);
}

TEST(Validate, DanglingBond) {
  TempDir d;
  auto path = d.file("bad.ka", "%agent: A(x)\n%agent: B(y)\n%init: 1 A(x)\nr: A(x) -> A(x!1) @ 1\n");
  Result r = run({"validate", path});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("E-PATTERN"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find(":4:"), std::string::npos) << r.err;
}

TEST(Validate, MissingAgentDeclaration) {
  TempDir d;
  auto path = d.file("bad.ka", "%agent: A(x)\n%init: 1 A(x)\nr: A(x) -> A(x),Z() @ 1\n");
  Result r = run({"validate", path});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("E-SIGNATURE"), std::string::npos) << r.err;
}

TEST(Validate, DistinctCodes) {
  TempDir d;
  EXPECT_NE(run({"validate", (d.path() / "missing.ka").string()}).err.find("E-IO"), std::string::npos);
  auto parse = d.file("p.ka", "%agent: A(x\n");
  EXPECT_NE(run({"validate", parse}).err.find("E-PARSE"), std::string::npos);
  auto rule = d.file("r.ka", "%agent: A(x~u~p)\nr: A(x~u) -> A(x) @ 1\n");
  Result rr = run({"validate", rule});
  EXPECT_EQ(rr.code, 1);
  EXPECT_NE(rr.err.find("E-RULE"), std::string::npos) << rr.err;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"simulate", fixture("mm.ka"), "--runs", "x"}).code, 2);
  EXPECT_EQ(run({"reduce", fixture("mm.ka"), "--disable", "bogus"}).code, 2);
  EXPECT_EQ(run({"simulate", fixture("mm.ka"), "--method", "tau"}).code, 2);
}

// ------------------------------------------------------------------- reduce

TEST(Reduce, ReconstructedLambda) {
  Result r = run({"reduce", fixture("lambda_pre_cii_reconstructed.ka")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("rules: 10 -> 4"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("agents: 5 -> 3"), std::string::npos) << r.out;
}

TEST(Reduce, CompetitiveWritesOutputs) {
  TempDir d;
  Result r = run({"reduce", fixture("lambda_competitive.ka"), "--out", d.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  json report = json::parse(slurp(d.path() / "report.json"));
  EXPECT_EQ(report["rules_after"], 1);
  std::set<std::string> names;
  for (const auto& s : report["steps"]) {
    for (const auto& c : s["introduced_constants"]) names.insert(c["name"]);
  }
  EXPECT_TRUE(names.count("E_T") && names.count("K_a") && names.count("K_b"));
  kred::KappaSystem red = kred::load_model((d.path() / "reduced.ka").string());
  EXPECT_EQ(red.rules.size(), 1u);
  EXPECT_TRUE(fs::exists(d.path() / "report.txt"));
  json manifest = json::parse(slurp(d.path() / "manifest.json"));
  EXPECT_EQ(manifest["command"], "reduce");
  EXPECT_EQ(manifest["models"][0]["fnv1a64"].get<std::string>().size(), 16u);
}

TEST(Reduce, DisableEnzymaticIsIdentity) {
  TempDir d;
  Result r = run({"reduce", fixture("mm.ka"), "--disable", "enzymatic", "--out", d.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  json report = json::parse(slurp(d.path() / "report.json"));
  EXPECT_TRUE(report["steps"].empty());
  EXPECT_EQ(report["rules_after"], 3);
  EXPECT_EQ(kred::print_model(kred::load_model((d.path() / "reduced.ka").string())),
            kred::print_model(kred::load_model(fixture("mm.ka"))));
}

TEST(Reduce, OutputRoundTripsAndIsIdempotent) {
  TempDir a, b;
  ASSERT_EQ(run({"reduce", fixture("fig1_tf_operator.ka"), "--out", a.path().string()}).code, 0);
  ASSERT_EQ(run({"reduce", (a.path() / "reduced.ka").string(), "--out", b.path().string()}).code, 0);
  EXPECT_TRUE(json::parse(slurp(b.path() / "report.json"))["steps"].empty());
  EXPECT_EQ(slurp(a.path() / "reduced.ka"), slurp(b.path() / "reduced.ka"));
}

// ----------------------------------------------------------------- simulate

TEST(Simulate, DeterministicBytes) {
  Result a = run({"simulate", fixture("mm.ka"), "--runs", "1", "--seed", "7"});
  Result b = run({"simulate", fixture("mm.ka"), "--runs", "1", "--seed", "7"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  Result c = run({"simulate", fixture("mm.ka"), "--runs", "1", "--seed", "8"});
  EXPECT_NE(a.out, c.out);
}

TEST(Simulate, SeedFromEnvironment) {
  ::setenv("KRED_SEED", "7", 1);
  Result env = run({"simulate", fixture("mm.ka"), "--runs", "3"});
  ::unsetenv("KRED_SEED");
  Result flag = run({"simulate", fixture("mm.ka"), "--runs", "3", "--seed", "7"});
  EXPECT_EQ(env.out, flag.out);
}

TEST(Simulate, ZeroRunsIsUsageError) {
  Result r = run({"simulate", fixture("mm.ka"), "--runs", "0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("E-USAGE"), std::string::npos) << r.err;
}

TEST(Simulate, GridOfHundredPoints) {
  TempDir d;
  Result r = run({"simulate", fixture("mm.ka"), "--runs", "20", "--grid", "100", "--out", d.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (auto obs : {"S", "P"}) {
    std::string csv = slurp(d.path() / (std::string(obs) + ".csv"));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "time,mean,std");
    EXPECT_EQ(lines(csv), 101u) << obs;
  }
  EXPECT_TRUE(fs::exists(d.path() / "manifest.json"));
}

TEST(Simulate, JsonFormat) {
  TempDir d;
  Result r = run({"simulate", fixture("dimer.ka"), "--runs", "5", "--grid", "11", "--format", "json", "--out",
                  d.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(slurp(d.path() / "summary.json"));
  EXPECT_EQ(j["n_runs"], 5);
  EXPECT_EQ(j["times"].size(), 11u);
}

TEST(Simulate, SpeciesCapIsRuntimeAbort) {
  TempDir d;
  auto path = d.file("poly.ka", "%agent: A(l,r)\n%init: 100 A(l,r)\np: A(r),A(l) -> A(r!1),A(l!1) @ 1\n");
  Result r = run({"simulate", path, "--runs", "1", "--max-species", "20"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("E-CAP"), std::string::npos) << r.err;
}

TEST(Simulate, OdeOutput) {
  TempDir d;
  Result r = run({"simulate", fixture("mm.ka"), "--ode", "--grid", "21", "--out", d.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(slurp(d.path() / "ode.csv")), 22u);
}

TEST(Simulate, ManifestReproducesRun) {
  TempDir a, b;
  std::vector<std::string> args{"simulate", fixture("fig1_tf_operator.ka"), "--runs", "30", "--seed", "3",
                                "--grid", "21", "--out", a.path().string()};
  ASSERT_EQ(run(args).code, 0);
  json m = json::parse(slurp(a.path() / "manifest.json"));
  std::vector<std::string> again = m["args"].get<std::vector<std::string>>();
  auto out = std::find(again.begin(), again.end(), "--out");
  ASSERT_NE(out, again.end());
  *(out + 1) = b.path().string();
  ASSERT_EQ(run(again).code, 0);
  for (const auto& f : m["outputs"]) {
    std::string name = f.get<std::string>();
    if (name == "manifest.json") continue;
    EXPECT_EQ(slurp(a.path() / name), slurp(b.path() / name)) << name;
  }
  EXPECT_EQ(m["config"]["simulation"]["seed"], 3);
}

// ------------------------------------------------------------------ compare

TEST(Compare, ReducedEqualsOriginalIsNearZero) {
  Result r = run({"compare", fixture("fig1_tf_operator.ka"), "--reduced", fixture("fig1_tf_operator.ka"), "--runs",
                  "500", "--grid", "11", "--seed", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "observable,time,mean_orig,std_orig,mean_red,std_red,bhattacharyya");
  double total = 0.0;
  int n = 0;
  while (std::getline(in, line)) {
    total += std::stod(line.substr(line.rfind(',') + 1));
    ++n;
  }
  EXPECT_EQ(n, 11);
  EXPECT_LT(total / n, 0.05);
}

TEST(Compare, NothingToCompare) {
  TempDir d;
  auto path = d.file("plain.ka", "%agent: A()\n%init: 5 A()\n%obs: A A()\nr: A() -> . @ 1\n");
  Result r = run({"compare", path, "--runs", "2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("nothing to compare"), std::string::npos) << r.err;
}

TEST(Compare, NoCommonObservables) {
  TempDir d;
  auto other = d.file("other.ka", "%agent: Q()\n%init: 5 Q()\n%obs: Q Q()\n");
  Result r = run({"compare", fixture("mm.ka"), "--reduced", other, "--runs", "2"});
  EXPECT_EQ(r.code, 2);
}

TEST(Compare, ScalingTable) {
  TempDir d;
  Result r = run({"compare", fixture("fig1_tf_operator.ka"), "--scale", "1,10", "--runs", "100", "--grid", "11",
                  "--t-end", "5", "--out", d.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string table = slurp(d.path() / "scaling_P.csv");
  EXPECT_EQ(table.substr(0, table.find('\n')), "time,bhattacharyya_N1,bhattacharyya_N10");
  EXPECT_EQ(lines(table), 12u);
  std::string summary = slurp(d.path() / "scaling_summary.csv");
  EXPECT_EQ(summary.substr(0, summary.find('\n')), "factor,observable,reduced_rules,time_average,early,late");
  EXPECT_EQ(lines(summary), 3u);
  EXPECT_NE(r.out.find("P: time-averaged distance"), std::string::npos) << r.out;
}

TEST(Compare, WritesPerObservableFiles) {
  TempDir d;
  Result r = run({"compare", fixture("mm.ka"), "--runs", "50", "--grid", "11", "--out", d.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (auto obs : {"S", "P"}) {
    std::string csv = slurp(d.path() / ("compare_" + std::string(obs) + ".csv"));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "time,mean_orig,std_orig,mean_red,std_red,bhattacharyya");
    EXPECT_EQ(lines(csv), 12u);
  }
  EXPECT_TRUE(fs::exists(d.path() / "reduced.ka"));
}

TEST(Cli, Fnv1a) {
  EXPECT_EQ(kred::cli::fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(kred::cli::fnv1a_hex("a"), "af63dc4c8601ec8c");
}

}  // namespace
