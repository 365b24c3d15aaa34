#pragma once

#include <string_view>

#include "kred/expression.hpp"
#include "kred/signature.hpp"

namespace kred {

/// Parses a comma-separated agent list such as `PRE(cii,rnap!1),RNAP(p1!1,p2)`.
/// `.` is the fictitious agent and `n Agent(...)` repeats a bond-free agent
/// n times. Every agent, site and internal state must be licensed by `sig`;
/// labels are kept as written. Dangling labels are accepted here and
/// rejected by check_pattern.
Expression parse_expression(std::string_view text, const Signature& sig);

}  // namespace kred
