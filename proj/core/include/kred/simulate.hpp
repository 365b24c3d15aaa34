#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "kred/network.hpp"
#include "kred/reduce.hpp"
#include "kred/system.hpp"

namespace kred {

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Uniform variates from Philox4x32-10. The key is the 64-bit seed; the
/// counter is (draw index low, draw index high, run index, stream), so every
/// (seed, run, stream) triple owns an independent, reproducible sequence.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint32_t run_index, std::uint32_t stream);

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t run_;
  std::uint32_t stream_;
  std::uint64_t draw_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
};

enum class SsaMethod { Direct, NextReaction };

struct SimConfig {
  double t_end = 1.0;
  std::vector<double> sample_grid;  // sorted, within [0, t_end]
  std::size_t n_runs = 1;
  std::uint64_t seed = 0;
  double volume = 1.0;
  SsaMethod method = SsaMethod::Direct;
  std::uint32_t stream = 0;  // 0 for original systems, 1 for reduced ones
  unsigned threads = 0;      // 0: hardware concurrency
};

/// `points` equally spaced times from 0 to t_end inclusive.
std::vector<double> uniform_grid(double t_end, std::size_t points);

void validate_config(const SimConfig& cfg);

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<std::int64_t>> states;
  std::uint64_t events = 0;
};

/// One exact stochastic run. The state reported at a grid time is the state
/// after the last event not later than it. Throws SimulationAbort when a
/// propensity is negative or not finite.
Trajectory ssa_run(const ReactionNetwork& net, const SimConfig& cfg, std::uint32_t run_index);

struct OdeTrajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::size_t steps = 0;  // RK4 steps per unit grid interval in the accepted solution
};

/// Fixed-step RK4 on ode_rhs; the step is halved until halving changes no
/// grid value by more than 1e-8 relative.
OdeTrajectory ode_solve(const ReactionNetwork& net, std::span<const double> z0, const SimConfig& cfg);

/// Counts per bin; bin b covers [origin + b*width, origin + (b+1)*width).
struct Histogram {
  double origin = -0.5;
  double width = 1.0;
  std::map<std::int64_t, std::int64_t> counts;

  std::int64_t total() const;
  double bin_center(std::int64_t bin) const { return origin + (static_cast<double>(bin) + 0.5) * width; }
};

Histogram make_histogram(std::span<const double> values, double origin, double width);

/// Width-1 bins centred on integers.
Histogram integer_histogram(std::span<const double> values);

/// Freedman-Diaconis width 2 IQR n^(-1/3) on `pooled`; falls back to
/// range/sqrt(n), then 1, when the spread is degenerate.
double freedman_diaconis_width(std::span<const double> pooled);

/// -ln sum sqrt(p q) over the union of bins. Both histograms must share
/// origin and width. Returns +infinity for disjoint supports.
double bhattacharyya(const Histogram& p, const Histogram& q);

/// Same for explicit distributions; weights are normalized first.
double bhattacharyya(const std::map<double, double>& p, const std::map<double, double>& q);

/// "inf" for infinity, shortest round-trip decimal otherwise.
std::string format_distance(double d);

struct ObservableSummary {
  std::string name;
  bool integer_valued = true;
  std::vector<double> mean;
  std::vector<double> std;
  std::vector<Histogram> histograms;       // one per grid time
  std::vector<std::vector<double>> values;  // [grid time][run]
};

struct EnsembleSummary {
  std::vector<double> times;
  std::size_t n_runs = 0;
  std::vector<ObservableSummary> observables;
};

/// n_runs independent runs on worker threads, merged by run index.
EnsembleSummary ensemble(const ReactionNetwork& net, const SimConfig& cfg);

struct ObservableComparison {
  std::string name;
  std::vector<double> mean_orig;
  std::vector<double> std_orig;
  std::vector<double> mean_red;
  std::vector<double> std_red;
  std::vector<double> distance;  // Bhattacharyya distance per grid time
  double time_average = 0.0;     // over grid times after 0
  double early = 0.0;            // over 0 < t <= t_end/3
  double late = 0.0;             // over t >= 2 t_end/3
};

struct Comparison {
  std::vector<double> times;
  std::vector<ObservableComparison> observables;

  const ObservableComparison* find(const std::string& name) const;
};

/// Distances between two ensembles of the same observables.
Comparison compare_summaries(const EnsembleSummary& original, const EnsembleSummary& reduced, double t_end);

/// Expands both systems and compares their ensembles; the original runs on
/// stream 0 and the reduced one on stream 1.
Comparison compare_systems(const KappaSystem& original, const KappaSystem& reduced, const SimConfig& cfg,
                           const ExpandOptions& opts = {});

struct ScalingExperiment {
  std::vector<double> factors;  // strictly increasing
};

/// Multiplies the unbinding and catalytic rates and the substrate initial
/// counts of the first branch set of `group` by `factor`.
KappaSystem scale_system(const KappaSystem& sys, const EnzymaticGroup& group, double factor);

struct ScalingRow {
  double factor = 1.0;
  std::size_t reduced_rules = 0;
  Comparison comparison;
};

struct ScalingResult {
  std::vector<ScalingRow> rows;

  /// Whether the time-averaged distance of `observable` strictly decreases
  /// along the factors.
  bool decreasing(const std::string& observable) const;
};

/// Rescales the first detected enzymatic group, reduces and compares for
/// each factor.
ScalingResult scaling_experiment(const KappaSystem& sys, const ScalingExperiment& exp, const SimConfig& cfg,
                                 const ReductionConfig& rcfg = {}, const ExpandOptions& opts = {});

}  // namespace kred
