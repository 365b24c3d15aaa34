#include <algorithm>
#include <cmath>
#include <string>

#include "kred/errors.hpp"
#include "kred/simulate.hpp"

namespace kred {

namespace {

using State = std::vector<double>;

void rk4_step(const ReactionNetwork& net, State& z, double h, double volume) {
  std::size_t n = z.size();
  State tmp(n);
  auto k1 = ode_rhs(net, z, volume);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + 0.5 * h * k1[i];
  auto k2 = ode_rhs(net, tmp, volume);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + 0.5 * h * k2[i];
  auto k3 = ode_rhs(net, tmp, volume);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + h * k3[i];
  auto k4 = ode_rhs(net, tmp, volume);
  for (std::size_t i = 0; i < n; ++i) z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

struct Pass {
  std::vector<State> grid;
  std::string failure;  // set when the solution left the admissible region
};

// Integrates over each grid interval with `per_interval` equal steps.
Pass integrate(const ReactionNetwork& net, const State& z0, const SimConfig& cfg, std::size_t per_interval) {
  Pass out;
  State z = z0;
  double t = 0.0;
  for (double target : cfg.sample_grid) {
    double span = target - t;
    if (span > 0.0) {
      double h = span / static_cast<double>(per_interval);
      for (std::size_t s = 0; s < per_interval; ++s) {
        rk4_step(net, z, h, cfg.volume);
        for (std::size_t i = 0; i < z.size(); ++i) {
          if (!std::isfinite(z[i])) {
            out.failure = "ODE solution of species " + std::to_string(i) + " is not finite";
          } else if (z[i] < -1e-9) {
            out.failure = "ODE solution of species " + std::to_string(i) + " went negative (" +
                          format_number(z[i]) + "); the system is too stiff for fixed-step RK4";
          }
          if (!out.failure.empty()) return out;
        }
      }
    }
    t = target;
    out.grid.push_back(z);
  }
  return out;
}

bool close(const std::vector<State>& a, const std::vector<State>& b) {
  for (std::size_t g = 0; g < a.size(); ++g) {
    for (std::size_t i = 0; i < a[g].size(); ++i) {
      double scale = std::max({std::abs(a[g][i]), std::abs(b[g][i]), 1e-12});
      if (std::abs(a[g][i] - b[g][i]) > 1e-8 * scale) return false;
    }
  }
  return true;
}

}  // namespace

OdeTrajectory ode_solve(const ReactionNetwork& net, std::span<const double> z0, const SimConfig& cfg) {
  validate_config(cfg);
  if (z0.size() != net.species.size()) throw Error(ErrorCode::Usage, "initial vector has the wrong size");
  State start(z0.begin(), z0.end());
  for (double v : start) {
    if (v < 0.0) throw Error(ErrorCode::Usage, "initial concentrations must be non-negative");
  }
  constexpr std::size_t kMaxSteps = std::size_t{1} << 20;
  std::size_t steps = 4;
  Pass coarse = integrate(net, start, cfg, steps);
  while (true) {
    Pass fine = integrate(net, start, cfg, 2 * steps);
    steps *= 2;
    if (coarse.failure.empty() && fine.failure.empty() && close(coarse.grid, fine.grid)) {
      return {cfg.sample_grid, std::move(fine.grid), steps};
    }
    if (steps >= kMaxSteps) {
      if (!fine.failure.empty()) throw Error(ErrorCode::Simulation, fine.failure);
      throw Error(ErrorCode::Simulation, "RK4 did not reach 1e-8 relative agreement under step halving");
    }
    coarse = std::move(fine);
  }
}

}  // namespace kred
