#pragma once

// Helpers shared by the reduction passes for taking rules apart at the level
// of connected components and putting them back together.

#include <optional>
#include <string>
#include <vector>

#include "kred/canonical.hpp"
#include "kred/rate.hpp"
#include "kred/rule.hpp"
#include "kred/system.hpp"

namespace kred::detail {

/// One side of a rule split into connected components.
struct SideView {
  std::vector<Expression> comps;
  std::vector<std::vector<int>> entries;       // entry positions of each component
  std::vector<std::optional<Species>> species;  // set when the component is a species

  bool species_only() const;
  std::size_t count(const Species& sp) const;
  std::vector<Species> species_list() const;  // requires species_only()
};

SideView view(const Expression& side, const Signature& sig);

/// Entry position of every non-fictitious agent.
std::vector<int> agent_entries(const Expression& e);

/// Drops positions where neither side has an agent.
void compact(Rule& r);

/// Builds a rule from species lists; species common to both sides come
/// first in the same order so that they are aligned as unchanged.
Rule species_rule(std::string name, const std::vector<Species>& lhs,
                  const std::vector<Species>& rhs, RateLaw rate, std::string origin);

/// Key identifying a rule up to renaming: both sides and their alignment.
std::string joint_key(const Rule& r, const Signature& sig);

/// Multiplier turning the rule constant into the per-reaction constant of
/// the expanded network for a rule whose left side consists of species:
/// the product of automorphism counts of the left components.
double reaction_factor(const std::vector<Species>& lhs);

/// C(#{p}, c) as an expression.
RateExpr binomial(const Expression& p, int c);

/// x^c / c! as an expression.
RateExpr power_over_factorial(const RateExpr& x, int c);

/// Species present in a multiset, first-seen order, with multiplicities.
std::vector<std::pair<Species, int>> tally(const std::vector<Species>& list);

/// Whether the connected pattern `p` has an embedding into `sp`.
bool matches(const Expression& p, const Species& sp);

/// Patterns counted by a rule's closed law.
std::vector<Expression> counted_patterns(const Rule& r);

/// Unique name derived from `base` that satisfies `taken`.
template <typename Taken>
std::string fresh_name(const std::string& base, Taken&& taken) {
  if (!taken(base)) return base;
  for (int i = 2;; ++i) {
    std::string name = base + "_" + std::to_string(i);
    if (!taken(name)) return name;
  }
}

std::vector<std::string> rule_names(const KappaSystem& sys);

}  // namespace kred::detail
