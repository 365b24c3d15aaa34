#pragma once

#include <vector>

#include "kred/expression.hpp"

namespace kred {

/// image[i] is the target agent hit by pattern agent i.
struct Embedding {
  std::vector<int> image;

  friend bool operator==(const Embedding&, const Embedding&) = default;
  friend auto operator<=>(const Embedding&, const Embedding&) = default;
};

/// All injective structure-preserving maps from `pattern` into `target`,
/// sorted lexicographically by image. Agents are indexed with fictitious
/// entries dropped. Sites mentioned by the pattern must exist in the target
/// with a matching state; free matches free, `!_` matches any bond, and a
/// bond matches a bond between the corresponding target sites.
std::vector<Embedding> embeddings(const LinkedGraph& pattern, const LinkedGraph& target);
std::vector<Embedding> embeddings(const Expression& pattern, const Expression& target);

/// Whether some embedding exists; stops at the first one.
bool embeds(const LinkedGraph& pattern, const LinkedGraph& target);

}  // namespace kred
