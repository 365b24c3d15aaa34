#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kred/expression.hpp"
#include "kred/signature.hpp"

namespace kred {

/// Canonical serialization of a connected expression together with the
/// agent order that produces it.
struct CanonicalForm {
  std::string key;
  std::vector<int> order;        // order[i] = agent of the input placed at position i
  std::size_t automorphisms = 1;  // number of agent permutations preserving the graph
};

/// Works on any connected pattern (partial interfaces and wildcards are
/// serialized as written). Throws Error(Pattern) if `e` is not connected.
CanonicalForm canonical_form(const Expression& e);

/// Order-independent key of an arbitrary expression: sorted component keys
/// joined by " | ". Equal keys iff the expressions are structurally equal.
std::string canonical_key(const Expression& e);

bool structurally_equal(const Expression& a, const Expression& b);

/// Size of the automorphism group of `e`, including permutations of
/// identical components.
std::size_t automorphism_count(const Expression& e);

/// `e` reordered and relabelled into canonical order.
Expression canonical_expression(const Expression& e);

/// A connected mixture identified by its canonical key.
class Species {
 public:
  /// Throws Error(Pattern) if `e` is not a connected mixture over `sig`.
  Species(const Expression& e, const Signature& sig);

  const std::string& key() const noexcept { return key_; }
  const Expression& expression() const noexcept { return expr_; }
  std::size_t automorphisms() const noexcept { return aut_; }
  std::size_t size() const { return expr_.entries.size(); }

  friend bool operator==(const Species& a, const Species& b) { return a.key_ == b.key_; }
  friend bool operator<(const Species& a, const Species& b) { return a.key_ < b.key_; }

 private:
  Expression expr_;
  std::string key_;
  std::size_t aut_ = 1;
};

/// Number of connected components of `p` structurally equal to `sp`.
std::size_t occurrence_count(const Species& sp, const Expression& p);

}  // namespace kred
