#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kred/expression.hpp"
#include "kred/signature.hpp"

namespace kred {

/// Arithmetic over copy numbers of patterns (`#{A(x)}`), named constants and
/// literals. Used for closed-form rate laws and derived observables.
struct RateExpr {
  enum class Op { Number, Constant, Count, Add, Sub, Mul, Div, Sqrt };

  Op op = Op::Number;
  double value = 0.0;          // Number
  std::string name;            // Constant
  Expression pattern;          // Count; connected pattern
  std::vector<RateExpr> args;  // operands of Add..Sqrt

  static RateExpr number(double v);
  static RateExpr constant(std::string name);
  static RateExpr count(Expression pattern);

  friend bool operator==(const RateExpr&, const RateExpr&) = default;
};

RateExpr operator+(RateExpr a, RateExpr b);
RateExpr operator-(RateExpr a, RateExpr b);
RateExpr operator*(RateExpr a, RateExpr b);
RateExpr operator/(RateExpr a, RateExpr b);
RateExpr sqrt(RateExpr a);

/// Parses `k*#{E(s)}/(1+K*#{S(e)})`. Patterns must be connected and
/// licensed by `sig`; constant names are not resolved here.
RateExpr parse_rate_expr(std::string_view text, const Signature& sig);

/// Minimal-parenthesis rendering; round-trips through parse_rate_expr.
std::string to_string(const RateExpr& e);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

using ConstantTable = std::map<std::string, double, std::less<>>;

/// Evaluates with `count(pattern)` supplying the copy numbers. Throws
/// Error(Rule) on an unknown constant.
double evaluate(const RateExpr& e, const ConstantTable& constants,
                const std::function<double(const Expression&)>& count);

/// Replaces every Count node for which `replace` returns a value.
RateExpr substitute(const RateExpr& e,
                    const std::function<std::optional<RateExpr>(const Expression&)>& replace);

/// Replaces Constant nodes by their numeric values when present in `constants`.
RateExpr fold_constants(const RateExpr& e, const ConstantTable& constants);

void collect_patterns(const RateExpr& e, std::vector<Expression>& out);
void collect_constants(const RateExpr& e, std::vector<std::string>& out);

}  // namespace kred
