#include <benchmark/benchmark.h>

#include <string>

#include "kred/canonical.hpp"
#include "kred/network.hpp"
#include "kred/parse.hpp"
#include "kred/reduce.hpp"
#include "kred/system.hpp"

namespace {

std::string fixture(const std::string& name) { return std::string(KRED_FIXTURE_DIR) + "/" + name; }

// Ring of n A agents, each carrying an internal state.
kred::Expression ring(int n, const kred::Signature& sig) {
  std::string text;
  for (int i = 0; i < n; ++i) {
    if (i) text += ",";
    int left = i == 0 ? n : i;
    text += "A(s~" + std::string(i % 3 == 0 ? "p" : "u") + ",l!" + std::to_string(left) + ",r!" +
            std::to_string(i + 1) + ")";
  }
  return kred::parse_expression(text, sig);
}

void BM_CanonicalRing(benchmark::State& state) {
  kred::Signature sig = kred::parse_signature("%agent: A(s~u~p,l,r)");
  kred::Expression e = ring(static_cast<int>(state.range(0)), sig);
  for (auto _ : state) benchmark::DoNotOptimize(kred::canonical_form(e));
}
BENCHMARK(BM_CanonicalRing)->RangeMultiplier(4)->Range(4, 256);

void BM_ExpandLambda(benchmark::State& state) {
  kred::KappaSystem sys = kred::load_model(fixture("lambda_pre_cii_reconstructed.ka"));
  for (auto _ : state) benchmark::DoNotOptimize(kred::expand(sys));
}
BENCHMARK(BM_ExpandLambda);

// Scaffold with n sites, each binding its own ligand: 2^n complexes.
void BM_ExpandScaffold(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  std::string sites, model;
  for (int i = 0; i < n; ++i) sites += (i ? ",s" : "s") + std::to_string(i);
  model += "%agent: S(" + sites + ")\n%init: 1 S(" + sites + ")\n";
  for (int i = 0; i < n; ++i) {
    std::string l = "L" + std::to_string(i), site = "s" + std::to_string(i);
    model += "%agent: " + l + "(s)\n%init: 10 " + l + "(s)\n";
    model += "b" + std::to_string(i) + ": S(" + site + ")," + l + "(s) <-> S(" + site + "!1)," + l + "(s!1) @ 1, 1\n";
  }
  kred::KappaSystem sys = kred::parse_model(model);
  for (auto _ : state) benchmark::DoNotOptimize(kred::expand(sys));
  state.counters["species"] = static_cast<double>(kred::expand(sys).species.size());
}
BENCHMARK(BM_ExpandScaffold)->DenseRange(2, 8, 2)->Unit(benchmark::kMillisecond);

void BM_ReduceAll(benchmark::State& state) {
  kred::KappaSystem sys = kred::load_model(fixture("lambda_pre_cii_reconstructed.ka"));
  for (auto _ : state) benchmark::DoNotOptimize(kred::reduce_all(sys));
}
BENCHMARK(BM_ReduceAll);

}  // namespace
