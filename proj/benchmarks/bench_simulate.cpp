#include <benchmark/benchmark.h>

#include <string>

#include "kred/network.hpp"
#include "kred/simulate.hpp"
#include "kred/system.hpp"

namespace {

std::string fixture(const std::string& name) { return std::string(KRED_FIXTURE_DIR) + "/" + name; }

void ssa(benchmark::State& state, const char* model, kred::SsaMethod method) {
  kred::ReactionNetwork net = kred::expand(kred::load_model(fixture(model)));
  kred::SimConfig cfg;
  cfg.t_end = 100.0;
  cfg.sample_grid = kred::uniform_grid(cfg.t_end, 101);
  cfg.method = method;
  std::uint64_t events = 0;
  std::uint32_t run = 0;
  for (auto _ : state) events += kred::ssa_run(net, cfg, run++).events;
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}

BENCHMARK_CAPTURE(ssa, lambda_direct, "lambda_pre_cii_reconstructed.ka", kred::SsaMethod::Direct);
BENCHMARK_CAPTURE(ssa, lambda_next_reaction, "lambda_pre_cii_reconstructed.ka", kred::SsaMethod::NextReaction);
BENCHMARK_CAPTURE(ssa, dimer_direct, "dimer.ka", kred::SsaMethod::Direct);

void BM_EnsembleMM(benchmark::State& state) {
  kred::ReactionNetwork net = kred::expand(kred::load_model(fixture("mm.ka")));
  kred::SimConfig cfg;
  cfg.t_end = 10.0;
  cfg.sample_grid = kred::uniform_grid(cfg.t_end, 50);
  cfg.n_runs = 1000;
  cfg.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kred::ensemble(net, cfg));
}
BENCHMARK(BM_EnsembleMM)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
