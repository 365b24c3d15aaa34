#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kred/canonical.hpp"
#include "kred/rate.hpp"
#include "kred/system.hpp"

namespace kred {

struct SpeciesCount {
  int species = 0;
  int count = 0;

  friend bool operator==(const SpeciesCount&, const SpeciesCount&) = default;
  friend auto operator<=>(const SpeciesCount&, const SpeciesCount&) = default;
};

/// A closed-form rate or observable with pattern counts resolved to
/// species weights, stored as a postfix program.
class CompiledExpr {
 public:
  struct Instr {
    RateExpr::Op op;
    double value = 0.0;
    std::vector<std::pair<int, double>> weights;  // Count: sum of w * x[species]
  };

  CompiledExpr() = default;
  explicit CompiledExpr(std::vector<Instr> program) : program_(std::move(program)) {}

  template <typename State>
  double operator()(const State& x) const {
    double stack[64];
    int top = 0;
    for (const auto& in : program_) {
      switch (in.op) {
        case RateExpr::Op::Number:
          stack[top++] = in.value;
          break;
        case RateExpr::Op::Count: {
          double v = 0.0;
          for (const auto& [s, w] : in.weights) v += w * static_cast<double>(x[s]);
          stack[top++] = v;
          break;
        }
        case RateExpr::Op::Sqrt:
          stack[top - 1] = sqrt_(stack[top - 1]);
          break;
        default: {
          double b = stack[--top];
          double& a = stack[top - 1];
          if (in.op == RateExpr::Op::Add) a += b;
          else if (in.op == RateExpr::Op::Sub) a -= b;
          else if (in.op == RateExpr::Op::Mul) a *= b;
          else a /= b;
        }
      }
    }
    return top ? stack[0] : 0.0;
  }

  /// Species read by the expression, sorted.
  std::vector<int> dependencies() const;
  const std::vector<Instr>& program() const { return program_; }

 private:
  static double sqrt_(double v);
  std::vector<Instr> program_;
};

struct Reaction {
  std::vector<SpeciesCount> consume;  // a_j, sorted by species
  std::vector<SpeciesCount> produce;  // a'_j, sorted by species
  std::vector<SpeciesCount> stoich;   // nonzero entries of a'_j - a_j
  RateLaw::Kind kind = RateLaw::Kind::MassAction;
  double k = 0.0;   // mass action
  int closed = -1;  // index into ReactionNetwork::closed_laws
  std::string source_rule;

  int order() const;
};

struct NetObservable {
  std::string name;
  std::vector<std::pair<int, double>> weights;  // pattern observable
  int closed = -1;                              // index into closed_laws otherwise
  bool integer_valued = true;
};

struct ReactionNetwork {
  std::vector<Species> species;
  std::vector<Reaction> reactions;
  std::vector<std::int64_t> init;
  std::vector<NetObservable> observables;
  std::vector<CompiledExpr> closed_laws;

  int find(const std::string& key) const;
  const NetObservable* observable(const std::string& name) const;
};

struct ExpandOptions {
  std::size_t max_species = 1000;
  std::size_t max_reactions = 5000;
};

/// Breadth-first expansion of the rules over the species reachable from the
/// initial mixture. Throws CapExceeded when a cap is passed.
ReactionNetwork expand(const KappaSystem& sys, const ExpandOptions& opts = {});

/// Compiles `e` against the species table; Count nodes become weighted sums
/// of species counts (instances of the pattern per species).
CompiledExpr compile(const RateExpr& e, const std::vector<Species>& species,
                     const ConstantTable& constants);

/// Number of instances of a connected pattern inside one species.
double instances(const Expression& pattern, const Species& sp);

template <typename State>
double propensity(const Reaction& rx, const ReactionNetwork& net, const State& x) {
  for (const auto& c : rx.consume) {
    if (static_cast<double>(x[c.species]) < c.count) return 0.0;
  }
  if (rx.kind == RateLaw::Kind::Closed) return net.closed_laws[rx.closed](x);
  double a = rx.k;
  for (const auto& c : rx.consume) {
    double n = static_cast<double>(x[c.species]);
    for (int i = 0; i < c.count; ++i) a *= (n - i) / (i + 1);
  }
  return a;
}

template <typename State>
double observe(const NetObservable& o, const ReactionNetwork& net, const State& x) {
  if (o.closed >= 0) return net.closed_laws[o.closed](x);
  double v = 0.0;
  for (const auto& [s, w] : o.weights) v += w * static_cast<double>(x[s]);
  return v;
}

/// Deterministic mass-action right-hand side with c_j = k_j V^(|a_j|-1);
/// closed laws are evaluated on `z` unchanged.
std::vector<double> ode_rhs(const ReactionNetwork& net, std::span<const double> z, double volume);

/// Species that the propensity of each reaction reads.
std::vector<std::vector<int>> reaction_inputs(const ReactionNetwork& net);

}  // namespace kred
