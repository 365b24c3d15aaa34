#pragma once

#include <string>
#include <utility>

#include "cursor.hpp"
#include "kred/expression.hpp"
#include "kred/signature.hpp"

namespace kred::detail {

/// Reads `Name(site~a~b,site)` (the part after `%agent:`).
std::pair<std::string, AgentSignature> parse_agent_declaration(Cursor& cur);

/// Reads an agent list starting at the cursor; stops before the first
/// character that cannot continue the list. Whitespace other than newlines
/// is skipped.
Expression parse_expression_at(Cursor& cur, const Signature& sig);

}  // namespace kred::detail

namespace kred {
struct RateExpr;
}

namespace kred::detail {

/// Reads an arithmetic rate expression starting at the cursor.
RateExpr parse_rate_at(Cursor& cur, const Signature& sig);

}  // namespace kred::detail
