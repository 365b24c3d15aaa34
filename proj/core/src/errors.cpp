#include "kred/errors.hpp"

namespace kred {

std::string_view code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Io: return "E-IO";
    case ErrorCode::Parse: return "E-PARSE";
    case ErrorCode::Signature: return "E-SIGNATURE";
    case ErrorCode::Pattern: return "E-PATTERN";
    case ErrorCode::Rule: return "E-RULE";
    case ErrorCode::CapExceeded: return "E-CAP";
    case ErrorCode::Reduction: return "E-REDUCE";
    case ErrorCode::Simulation: return "E-SIM";
    case ErrorCode::Usage: return "E-USAGE";
  }
  return "E-UNKNOWN";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message, SourceLocation loc) {
  std::string out(code_name(code));
  if (loc.known()) {
    out += " at " + std::to_string(loc.line) + ":" + std::to_string(loc.column);
  }
  out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, SourceLocation loc)
    : std::runtime_error(decorate(code, message, loc)), code_(code), loc_(loc), message_(message) {}

Error Error::relocated(SourceLocation loc) const {
  SourceLocation merged = loc;
  if (loc_.known()) {
    merged.line = loc.line + loc_.line - 1;
    merged.column = loc_.line == 1 ? loc.column + loc_.column - 1 : loc_.column;
  }
  return Error(code_, message_, merged);
}

CapExceeded::CapExceeded(Which which, std::size_t cap)
    : Error(ErrorCode::CapExceeded,
            std::string(which == Which::Species ? "species" : "reactions") +
                " cap of " + std::to_string(cap) +
                " exceeded; the rule set may generate an infinite network"),
      which_(which) {}

SimulationAbort::SimulationAbort(std::size_t run_index, const std::string& detail)
    : Error(ErrorCode::Simulation, "run " + std::to_string(run_index) + " aborted: " + detail),
      run_(run_index) {}

}  // namespace kred
