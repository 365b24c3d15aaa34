#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace kred::cli {

/// Exit codes of the command-line tool.
enum Exit : int { Ok = 0, ModelError = 1, UsageError = 2, RuntimeAbort = 3 };

/// Runs `kred <command> ...` with `args` excluding the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a of `data`, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace kred::cli
