#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "kred/errors.hpp"
#include "kred/simulate.hpp"

namespace kred {

std::int64_t Histogram::total() const {
  std::int64_t n = 0;
  for (const auto& [bin, c] : counts) n += c;
  return n;
}

Histogram make_histogram(std::span<const double> values, double origin, double width) {
  Histogram h;
  h.origin = origin;
  h.width = width;
  for (double v : values) ++h.counts[static_cast<std::int64_t>(std::floor((v - origin) / width))];
  return h;
}

Histogram integer_histogram(std::span<const double> values) { return make_histogram(values, -0.5, 1.0); }

double freedman_diaconis_width(std::span<const double> pooled) {
  if (pooled.empty()) return 1.0;
  std::vector<double> v(pooled.begin(), pooled.end());
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    double pos = q * static_cast<double>(v.size() - 1);
    auto lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  double n = static_cast<double>(v.size());
  double iqr = quantile(0.75) - quantile(0.25);
  if (iqr > 0.0) return 2.0 * iqr / std::cbrt(n);
  double range = v.back() - v.front();
  if (range > 0.0) return range / std::sqrt(n);
  return 1.0;
}

double bhattacharyya(const Histogram& p, const Histogram& q) {
  if (p.counts.empty() || q.counts.empty()) throw Error(ErrorCode::Simulation, "empty histogram");
  if (p.origin != q.origin || p.width != q.width) {
    throw Error(ErrorCode::Simulation, "histograms use different bins");
  }
  double np = static_cast<double>(p.total());
  double nq = static_cast<double>(q.total());
  double bc = 0.0;
  for (const auto& [bin, c] : p.counts) {
    auto it = q.counts.find(bin);
    if (it != q.counts.end()) bc += std::sqrt(static_cast<double>(c) * static_cast<double>(it->second));
  }
  if (bc == 0.0) return std::numeric_limits<double>::infinity();
  return std::max(0.0, -std::log(bc / std::sqrt(np * nq)));
}

double bhattacharyya(const std::map<double, double>& p, const std::map<double, double>& q) {
  auto sum = [](const std::map<double, double>& m) {
    double s = 0.0;
    for (const auto& [x, w] : m) {
      if (w < 0.0) throw Error(ErrorCode::Simulation, "negative probability weight");
      s += w;
    }
    return s;
  };
  double sp = sum(p);
  double sq = sum(q);
  if (sp <= 0.0 || sq <= 0.0) throw Error(ErrorCode::Simulation, "empty histogram");
  double bc = 0.0;
  for (const auto& [x, w] : p) {
    auto it = q.find(x);
    if (it != q.end()) bc += std::sqrt(w * it->second);
  }
  if (bc == 0.0) return std::numeric_limits<double>::infinity();
  return std::max(0.0, -std::log(bc / std::sqrt(sp * sq)));
}

std::string format_distance(double d) { return std::isinf(d) ? "inf" : format_number(d); }

EnsembleSummary ensemble(const ReactionNetwork& net, const SimConfig& cfg) {
  validate_config(cfg);
  std::size_t grid = cfg.sample_grid.size();
  std::size_t n_obs = net.observables.size();
  EnsembleSummary out;
  out.times = cfg.sample_grid;
  out.n_runs = cfg.n_runs;
  out.observables.resize(n_obs);
  for (std::size_t o = 0; o < n_obs; ++o) {
    auto& s = out.observables[o];
    s.name = net.observables[o].name;
    s.integer_valued = net.observables[o].integer_valued;
    s.values.assign(grid, std::vector<double>(cfg.n_runs, 0.0));
  }

  std::atomic<std::size_t> next{0};
  std::mutex failure_lock;
  std::exception_ptr failure;
  std::size_t failed_run = std::numeric_limits<std::size_t>::max();
  auto worker = [&] {
    while (true) {
      std::size_t run = next.fetch_add(1);
      if (run >= cfg.n_runs) return;
      try {
        Trajectory tr = ssa_run(net, cfg, static_cast<std::uint32_t>(run));
        for (std::size_t g = 0; g < grid; ++g) {
          for (std::size_t o = 0; o < n_obs; ++o) {
            out.observables[o].values[g][run] = observe(net.observables[o], net, tr.states[g]);
          }
        }
      } catch (...) {
        std::lock_guard lock(failure_lock);
        if (run < failed_run) {
          failed_run = run;
          failure = std::current_exception();
        }
      }
    }
  };
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.n_runs));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  for (auto& s : out.observables) {
    for (std::size_t g = 0; g < grid; ++g) {
      const auto& v = s.values[g];
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      var /= static_cast<double>(v.size());
      s.mean.push_back(mean);
      s.std.push_back(std::sqrt(var));
      if (s.integer_valued) {
        s.histograms.push_back(integer_histogram(v));
      } else {
        double lo = *std::min_element(v.begin(), v.end());
        s.histograms.push_back(make_histogram(v, lo, freedman_diaconis_width(v)));
      }
    }
  }
  return out;
}

const ObservableComparison* Comparison::find(const std::string& name) const {
  for (const auto& o : observables) {
    if (o.name == name) return &o;
  }
  return nullptr;
}

namespace {

double average(const std::vector<double>& times, const std::vector<double>& d, double from, double to,
               bool open_start) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t g = 0; g < times.size(); ++g) {
    double t = times[g];
    if (t < from || t > to || (open_start && t <= from)) continue;
    sum += d[g];
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

}  // namespace

Comparison compare_summaries(const EnsembleSummary& original, const EnsembleSummary& reduced, double t_end) {
  if (original.times != reduced.times) throw Error(ErrorCode::Usage, "ensembles use different sample grids");
  for (const auto& o : reduced.observables) {
    bool found = std::any_of(original.observables.begin(), original.observables.end(),
                             [&](const ObservableSummary& s) { return s.name == o.name; });
    if (!found) throw Error(ErrorCode::Usage, "observable '" + o.name + "' exists only in the reduced system");
  }
  Comparison out;
  out.times = original.times;
  for (const auto& a : original.observables) {
    auto it = std::find_if(reduced.observables.begin(), reduced.observables.end(),
                           [&](const ObservableSummary& s) { return s.name == a.name; });
    if (it == reduced.observables.end()) {
      throw Error(ErrorCode::Usage, "observable '" + a.name + "' exists only in the original system");
    }
    const auto& b = *it;
    ObservableComparison c{a.name, a.mean, a.std, b.mean, b.std, {}};
    bool integer = a.integer_valued && b.integer_valued;
    for (std::size_t g = 0; g < out.times.size(); ++g) {
      if (integer) {
        c.distance.push_back(bhattacharyya(a.histograms[g], b.histograms[g]));
        continue;
      }
      std::vector<double> pooled = a.values[g];
      pooled.insert(pooled.end(), b.values[g].begin(), b.values[g].end());
      double lo = *std::min_element(pooled.begin(), pooled.end());
      double w = freedman_diaconis_width(pooled);
      c.distance.push_back(bhattacharyya(make_histogram(a.values[g], lo, w), make_histogram(b.values[g], lo, w)));
    }
    c.time_average = average(out.times, c.distance, 0.0, t_end, true);
    c.early = average(out.times, c.distance, 0.0, t_end / 3.0, true);
    c.late = average(out.times, c.distance, 2.0 * t_end / 3.0, t_end, false);
    out.observables.push_back(std::move(c));
  }
  return out;
}

Comparison compare_systems(const KappaSystem& original, const KappaSystem& reduced, const SimConfig& cfg,
                           const ExpandOptions& opts) {
  ReactionNetwork a = expand(original, opts);
  ReactionNetwork b = expand(reduced, opts);
  SimConfig ca = cfg;
  ca.stream = 0;
  SimConfig cb = cfg;
  cb.stream = 1;
  return compare_summaries(ensemble(a, ca), ensemble(b, cb), cfg.t_end);
}

KappaSystem scale_system(const KappaSystem& sys, const EnzymaticGroup& group, double factor) {
  KappaSystem out = sys;
  std::vector<std::string> scaled;
  std::vector<Species> substrates;
  for (const auto& br : group.branches) {
    scaled.push_back(br.catalytic);
    if (br.unbinding) scaled.push_back(*br.unbinding);
    for (const auto& s : br.substrates) {
      if (std::find(substrates.begin(), substrates.end(), s) == substrates.end()) substrates.push_back(s);
    }
  }
  for (auto& r : out.rules) {
    if (std::find(scaled.begin(), scaled.end(), r.name) != scaled.end()) r.rate.k *= factor;
  }
  for (auto& e : out.init) {
    if (std::find(substrates.begin(), substrates.end(), e.species) != substrates.end()) {
      e.count = std::llround(static_cast<double>(e.count) * factor);
    }
  }
  return out;
}

bool ScalingResult::decreasing(const std::string& observable) const {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto* prev = rows[i - 1].comparison.find(observable);
    const auto* cur = rows[i].comparison.find(observable);
    if (!prev || !cur || !(cur->time_average < prev->time_average)) return false;
  }
  return true;
}

ScalingResult scaling_experiment(const KappaSystem& sys, const ScalingExperiment& exp, const SimConfig& cfg,
                                 const ReductionConfig& rcfg, const ExpandOptions& opts) {
  for (std::size_t i = 1; i < exp.factors.size(); ++i) {
    if (!(exp.factors[i] > exp.factors[i - 1])) {
      throw Error(ErrorCode::Usage, "scale factors must be strictly increasing");
    }
  }
  for (double f : exp.factors) {
    if (!(f > 0.0)) throw Error(ErrorCode::Usage, "scale factors must be positive");
  }
  auto groups = detect_enzymatic(sys, rcfg);
  if (groups.empty()) throw Error(ErrorCode::Reduction, "no enzymatic group to scale");
  ScalingResult out;
  for (double f : exp.factors) {
    KappaSystem scaled = scale_system(sys, groups.front(), f);
    KappaSystem reduced = reduce_all(scaled, rcfg).first;
    out.rows.push_back({f, reduced.rules.size(), compare_systems(scaled, reduced, cfg, opts)});
  }
  return out;
}

}  // namespace kred
