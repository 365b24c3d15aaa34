#include <algorithm>
#include <cmath>
#include <limits>

#include "kred/errors.hpp"
#include "kred/simulate.hpp"

namespace kred {

std::vector<double> uniform_grid(double t_end, std::size_t points) {
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = points == 1 ? t_end : t_end * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return grid;
}

void validate_config(const SimConfig& cfg) {
  if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end)) {
    throw Error(ErrorCode::Usage, "t_end must be a finite non-negative time");
  }
  if (cfg.n_runs < 1) throw Error(ErrorCode::Usage, "the number of runs must be at least 1");
  if (!(cfg.volume > 0.0) || !std::isfinite(cfg.volume)) {
    throw Error(ErrorCode::Usage, "volume must be positive");
  }
  if (cfg.sample_grid.empty()) throw Error(ErrorCode::Usage, "sample grid is empty");
  if (!std::is_sorted(cfg.sample_grid.begin(), cfg.sample_grid.end())) {
    throw Error(ErrorCode::Usage, "sample grid is not sorted");
  }
  if (cfg.sample_grid.front() < 0.0 || cfg.sample_grid.back() > cfg.t_end) {
    throw Error(ErrorCode::Usage, "sample grid leaves [0, t_end]");
  }
}

namespace {

class Simulator {
 public:
  Simulator(const ReactionNetwork& net, std::uint32_t run) : net_(net), run_(run) {
    auto inputs = reaction_inputs(net);
    readers_.resize(net.species.size());
    for (std::size_t r = 0; r < inputs.size(); ++r) {
      for (int s : inputs[r]) readers_[s].push_back(static_cast<int>(r));
    }
    for (std::size_t r = 0; r < net.reactions.size(); ++r) {
      std::vector<int> dep;
      for (const auto& s : net.reactions[r].stoich) {
        dep.insert(dep.end(), readers_[s.species].begin(), readers_[s.species].end());
      }
      std::sort(dep.begin(), dep.end());
      dep.erase(std::unique(dep.begin(), dep.end()), dep.end());
      affected_.push_back(std::move(dep));
    }
  }

  double rate(int r, const std::vector<std::int64_t>& x) const {
    const auto& rx = net_.reactions[r];
    double a = propensity(rx, net_, x);
    if (!std::isfinite(a) || a < 0.0) {
      throw SimulationAbort(run_, "reaction " + std::to_string(r) + " from rule '" + rx.source_rule +
                                      "' has propensity " + format_number(a) + " at time " + format_number(t_));
    }
    return a;
  }

  void fire(int r, std::vector<std::int64_t>& x) const {
    for (const auto& s : net_.reactions[r].stoich) x[s.species] += s.count;
  }

  const std::vector<int>& affected(int r) const { return affected_[r]; }
  void at(double t) { t_ = t; }

 private:
  const ReactionNetwork& net_;
  std::uint32_t run_;
  std::vector<std::vector<int>> readers_;
  std::vector<std::vector<int>> affected_;
  double t_ = 0.0;
};

struct Recorder {
  const std::vector<double>& grid;
  Trajectory& out;
  std::size_t next = 0;

  // Records the current state for every grid time before `t`.
  bool advance(double t, const std::vector<std::int64_t>& x) {
    while (next < grid.size() && grid[next] < t) {
      out.states.push_back(x);
      ++next;
    }
    return next < grid.size();
  }
};

void direct(const ReactionNetwork& net, const SimConfig& cfg, std::uint32_t run, Trajectory& out) {
  Simulator sim(net, run);
  RandomStream rng(cfg.seed, run, cfg.stream);
  std::vector<std::int64_t> x = net.init;
  std::size_t n = net.reactions.size();
  std::vector<double> a(n);
  for (std::size_t r = 0; r < n; ++r) a[r] = sim.rate(static_cast<int>(r), x);
  Recorder rec{cfg.sample_grid, out};
  double t = 0.0;
  while (true) {
    double total = 0.0;
    for (double v : a) total += v;
    if (total <= 0.0) {
      rec.advance(std::numeric_limits<double>::infinity(), x);
      return;
    }
    double t_next = t - std::log(rng.uniform()) / total;
    if (!rec.advance(t_next, x)) return;
    double target = rng.uniform() * total;
    std::size_t pick = 0;
    double acc = a[0];
    while (acc < target && pick + 1 < n) acc += a[++pick];
    while (a[pick] <= 0.0) --pick;  // rounding at the top end
    t = t_next;
    sim.at(t);
    sim.fire(static_cast<int>(pick), x);
    ++out.events;
    for (int r : sim.affected(static_cast<int>(pick))) a[r] = sim.rate(r, x);
  }
}

void next_reaction(const ReactionNetwork& net, const SimConfig& cfg, std::uint32_t run, Trajectory& out) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Simulator sim(net, run);
  RandomStream rng(cfg.seed, run, cfg.stream);
  std::vector<std::int64_t> x = net.init;
  std::size_t n = net.reactions.size();
  std::vector<double> a(n);
  std::vector<double> tau(n, inf);
  auto draw = [&](double rate, double now) { return rate > 0.0 ? now - std::log(rng.uniform()) / rate : inf; };
  for (std::size_t r = 0; r < n; ++r) {
    a[r] = sim.rate(static_cast<int>(r), x);
    tau[r] = draw(a[r], 0.0);
  }
  Recorder rec{cfg.sample_grid, out};
  while (true) {
    auto it = std::min_element(tau.begin(), tau.end());
    double t = it == tau.end() ? inf : *it;
    if (!rec.advance(t, x) || t == inf) return;
    int mu = static_cast<int>(it - tau.begin());
    sim.at(t);
    sim.fire(mu, x);
    ++out.events;
    bool self = false;
    for (int r : sim.affected(mu)) {
      double old = a[r];
      a[r] = sim.rate(r, x);
      if (r == mu) {
        self = true;
        tau[r] = draw(a[r], t);
      } else if (a[r] <= 0.0) {
        tau[r] = inf;
      } else if (old > 0.0 && tau[r] != inf) {
        tau[r] = t + (old / a[r]) * (tau[r] - t);
      } else {
        tau[r] = draw(a[r], t);
      }
    }
    if (!self) tau[mu] = draw(a[mu], t);
  }
}

}  // namespace

Trajectory ssa_run(const ReactionNetwork& net, const SimConfig& cfg, std::uint32_t run_index) {
  Trajectory out;
  out.times = cfg.sample_grid;
  out.states.reserve(cfg.sample_grid.size());
  if (net.reactions.empty()) {
    out.states.assign(cfg.sample_grid.size(), net.init);
    return out;
  }
  if (cfg.method == SsaMethod::Direct) {
    direct(net, cfg, run_index, out);
  } else {
    next_reaction(net, cfg, run_index, out);
  }
  return out;
}

}  // namespace kred
