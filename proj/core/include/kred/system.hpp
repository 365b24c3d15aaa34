#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kred/canonical.hpp"
#include "kred/rate.hpp"
#include "kred/rule.hpp"
#include "kred/signature.hpp"

namespace kred {

struct Observable {
  std::string name;
  bool closed = false;
  Expression pattern;  // connected pattern when !closed
  RateExpr expr;       // when closed
};

struct InitEntry {
  Species species;
  long long count = 0;
};

struct Constant {
  std::string name;
  double value = 0.0;
};

/// A Kappa model: signature, initial mixture as species counts,
/// observables and rules.
struct KappaSystem {
  Signature signature;
  std::vector<Constant> constants;
  std::vector<InitEntry> init;  // one entry per species, first-seen order
  std::vector<Observable> observables;
  std::vector<Rule> rules;

  /// Adds `count` copies of every connected component of `mixture`.
  void add_init(const Expression& mixture, long long count);
  long long initial_count(const Species& sp) const;
  ConstantTable constant_table() const;
  const Rule* find_rule(std::string_view name) const;
  bool has_constant(std::string_view name) const;
  /// Agent names used by rules, initial mixture and observables.
  std::vector<std::string> used_agents() const;
};

/// Reads the model language:
///   %agent: Name(site~s1~s2,site)
///   %const: NAME value
///   %init: <count> <mixture>
///   %obs: <name> <pattern>          or  %obs: <name> @@ <expr>
///   [name:] lhs -> rhs @ k          or  lhs -> rhs @@ <expr>
///   [name:] lhs <-> rhs @ k1, k2    (rules name_fwd and name_rev)
/// `#` starts a comment except in `#{`. Mass-action rates may name a
/// constant. Every rule is validated.
KappaSystem parse_model(std::string_view text);
KappaSystem load_model(const std::string& path);

/// Prints a model that parse_model reads back to an equal system.
std::string print_model(const KappaSystem& sys);

/// Per-rule edit scripts; rethrows the first validation failure.
std::vector<EditScript> validate_system(const KappaSystem& sys);

}  // namespace kred
