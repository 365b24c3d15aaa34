#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kred {

/// Stable diagnostic categories. The CLI maps these onto exit codes and
/// prints `code_name()` in front of every message.
enum class ErrorCode {
  Io,
  Parse,
  Signature,
  Pattern,
  Rule,
  CapExceeded,
  Reduction,
  Simulation,
  Usage,
};

std::string_view code_name(ErrorCode code) noexcept;

struct SourceLocation {
  int line = 0;    // 1-based; 0 when unknown
  int column = 0;  // 1-based; 0 when unknown

  bool known() const noexcept { return line > 0; }
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, SourceLocation loc = {});

  ErrorCode code() const noexcept { return code_; }
  const SourceLocation& location() const noexcept { return loc_; }
  const std::string& message() const noexcept { return message_; }

  /// Same error re-anchored at `loc`, used when a sub-parser reports
  /// columns relative to a fragment of a larger file.
  Error relocated(SourceLocation loc) const;

 private:
  ErrorCode code_;
  SourceLocation loc_;
  std::string message_;
};

/// Thrown by network expansion when a cap is hit.
class CapExceeded : public Error {
 public:
  enum class Which { Species, Reactions };
  CapExceeded(Which which, std::size_t cap);
  Which which() const noexcept { return which_; }

 private:
  Which which_;
};

/// Thrown by the simulator when a run hits a non-finite or negative rate.
class SimulationAbort : public Error {
 public:
  SimulationAbort(std::size_t run_index, const std::string& detail);
  std::size_t run_index() const noexcept { return run_; }

 private:
  std::size_t run_;
};

}  // namespace kred
