#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kred/canonical.hpp"
#include "kred/errors.hpp"
#include "kred/expression.hpp"
#include "kred/rate.hpp"
#include "kred/signature.hpp"

namespace kred {

struct RateLaw {
  enum class Kind { MassAction, Closed };

  Kind kind = Kind::MassAction;
  double k = 0.0;  // MassAction
  RateExpr expr;   // Closed: propensity of the whole rule

  static RateLaw mass_action(double k) { return {Kind::MassAction, k, {}}; }
  static RateLaw closed(RateExpr e) { return {Kind::Closed, 0.0, std::move(e)}; }
  bool is_closed() const noexcept { return kind == Kind::Closed; }

  friend bool operator==(const RateLaw&, const RateLaw&) = default;
};

std::string to_string(const RateLaw& law);

struct Rule {
  std::string name;
  Expression lhs;
  Expression rhs;
  RateLaw rate;
  std::string origin = "user";  // or the id of the reduction pass that built it
  SourceLocation loc;
};

/// One primitive rewriting step. Agent indices are positions among the
/// non-fictitious agents of the respective side.
struct EditOp {
  enum class Kind { Creation, Deletion, Modification, Binding, Unbinding };

  Kind kind;
  int lhs_agent = -1;
  int rhs_agent = -1;
  std::string site;
  std::string detail;
};

std::string_view kind_name(EditOp::Kind k);

/// Positional alignment of a rule: agents of the same name at the same
/// position are preserved until the first name mismatch, after which the
/// remaining left agents are deleted and the remaining right agents
/// created. `.` on one side marks a creation or deletion.
struct EditScript {
  std::vector<std::pair<int, int>> preserved;  // (lhs agent, rhs agent)
  std::vector<int> deleted;                    // lhs agents
  std::vector<int> created;                    // rhs agents
  std::vector<EditOp> ops;
};

/// Checks both sides are patterns, aligns them and derives the edit script.
/// Throws Error(Rule) when the right side is not obtainable from the left.
EditScript validate_rule(const Rule& r, const Signature& sig);

std::string to_string(const EditOp& op, const Rule& r);

/// `lhs -> rhs @ k` without the rule name.
std::string to_string(const Rule& r);

enum class Role { Reactant, Modifier, Product, Absent, NetConsumer, NetProducer };

std::string_view role_name(Role r);

Role classify_species(const Rule& r, const Species& sp);

/// Rewrites `mixture` in place along `embedding` of the rule's left side.
/// Agents created by the rule are appended; deleted agents are removed and
/// later indices shift down.
void apply_rule(const Rule& r, const EditScript& script, const std::vector<int>& embedding,
                LinkedGraph& mixture);

}  // namespace kred
