#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kred/signature.hpp"

namespace kred {

struct Binding {
  enum class Kind : std::uint8_t { Free, Wildcard, Bound };

  Kind kind = Kind::Free;
  int label = 0;  // meaningful only when kind == Bound

  static Binding free() { return {}; }
  static Binding wildcard() { return {Kind::Wildcard, 0}; }
  static Binding bound(int label) { return {Kind::Bound, label}; }

  bool is_free() const noexcept { return kind == Kind::Free; }
  bool is_bound() const noexcept { return kind == Kind::Bound; }
  bool is_wildcard() const noexcept { return kind == Kind::Wildcard; }

  friend bool operator==(const Binding&, const Binding&) = default;
};

struct Site {
  std::string name;
  std::optional<std::string> internal;  // nullopt: no or unspecified state
  Binding binding;

  friend bool operator==(const Site&, const Site&) = default;
};

struct Agent {
  std::string name;
  std::vector<Site> sites;

  const Site* find(std::string_view site) const;
  Site* find(std::string_view site);

  friend bool operator==(const Agent&, const Agent&) = default;
};

/// A Kappa expression: an ordered list of agents and fictitious agents
/// (`std::nullopt`). Order and label numbering are syntax; structural
/// equivalence is decided by canonical forms.
struct Expression {
  std::vector<std::optional<Agent>> entries;

  std::size_t agent_count() const;
  bool empty() const { return agent_count() == 0; }
  /// Agents with fictitious entries dropped, preserving order.
  std::vector<Agent> agents() const;

  friend bool operator==(const Expression&, const Expression&) = default;
};

/// Location of one site inside an expression's agent list (fictitious
/// entries excluded).
struct SiteRef {
  int agent = -1;
  int site = -1;

  friend bool operator==(const SiteRef&, const SiteRef&) = default;
  friend auto operator<=>(const SiteRef&, const SiteRef&) = default;
};

/// Agents plus resolved bond partners; the working form for matching and
/// rewriting. Built from an Expression, fictitious entries dropped.
struct LinkedGraph {
  std::vector<Agent> agents;
  // partner[a][s] is set when site s of agent a carries a label that
  // occurs exactly twice.
  std::vector<std::vector<std::optional<SiteRef>>> partner;

  std::size_t size() const { return agents.size(); }
};

/// Throws Error(Pattern) when a label occurs more than twice. Labels that
/// occur once stay dangling (no partner, kind Bound).
LinkedGraph link(const Expression& e);

/// Inverse of link: labels numbered 1..k in first-occurrence order.
Expression unlink(const LinkedGraph& g);

/// Structural-equivalence normal form: fictitious agents removed, labels
/// renamed densely in first-occurrence order, dangling labels erased.
Expression normalize(const Expression& e);

/// Connected components (under bonds) of the normalized expression, each
/// itself normalized. Components are listed in order of their first agent.
std::vector<Expression> components(const Expression& e);

bool is_connected(const Expression& e);

/// Concatenate expressions, renumbering labels so they stay distinct.
Expression concat(const std::vector<Expression>& parts);

/// Kappa concrete syntax. Runs of identical bond-free agents are printed
/// once with a count prefix (`10 CI(ci,or)`).
std::string to_string(const Expression& e);
std::string to_string(const Agent& a);

/// Pattern conditions (i)-(v) against `sig`; throws Error(Pattern) or
/// Error(Signature) describing the first violation.
void check_pattern(const Expression& e, const Signature& sig);

/// Pattern that is fully specified: every declared site present, internal
/// sites carry a state, no wildcard bonds, no fictitious agents.
bool is_mixture(const Expression& e, const Signature& sig);
void check_mixture(const Expression& e, const Signature& sig);

/// True when agent `a` documents its full interface with no wildcard.
bool is_fully_specified(const Agent& a, const Signature& sig);

}  // namespace kred
