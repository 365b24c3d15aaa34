#include "kred/rate.hpp"

#include <charconv>
#include <cmath>

#include "kred/errors.hpp"
#include "syntax.hpp"

namespace kred {

RateExpr RateExpr::number(double v) {
  RateExpr e;
  e.op = Op::Number;
  e.value = v;
  return e;
}

RateExpr RateExpr::constant(std::string name) {
  RateExpr e;
  e.op = Op::Constant;
  e.name = std::move(name);
  return e;
}

RateExpr RateExpr::count(Expression pattern) {
  RateExpr e;
  e.op = Op::Count;
  e.pattern = normalize(pattern);
  return e;
}

namespace {

RateExpr binary(RateExpr::Op op, RateExpr a, RateExpr b) {
  RateExpr e;
  e.op = op;
  e.args.push_back(std::move(a));
  e.args.push_back(std::move(b));
  return e;
}

int precedence(const RateExpr& e) {
  switch (e.op) {
    case RateExpr::Op::Add:
    case RateExpr::Op::Sub: return 1;
    case RateExpr::Op::Mul:
    case RateExpr::Op::Div: return 2;
    default: return 3;
  }
}

}  // namespace

RateExpr operator+(RateExpr a, RateExpr b) { return binary(RateExpr::Op::Add, std::move(a), std::move(b)); }
RateExpr operator-(RateExpr a, RateExpr b) { return binary(RateExpr::Op::Sub, std::move(a), std::move(b)); }
RateExpr operator*(RateExpr a, RateExpr b) { return binary(RateExpr::Op::Mul, std::move(a), std::move(b)); }
RateExpr operator/(RateExpr a, RateExpr b) { return binary(RateExpr::Op::Div, std::move(a), std::move(b)); }

RateExpr sqrt(RateExpr a) {
  RateExpr e;
  e.op = RateExpr::Op::Sqrt;
  e.args.push_back(std::move(a));
  return e;
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_string(const RateExpr& e) {
  using Op = RateExpr::Op;
  switch (e.op) {
    case Op::Number:
      return e.value < 0 ? "(0-" + format_number(-e.value) + ")" : format_number(e.value);
    case Op::Constant: return e.name;
    case Op::Count: return "#{" + to_string(e.pattern) + "}";
    case Op::Sqrt: return "sqrt(" + to_string(e.args[0]) + ")";
    default: break;
  }
  int p = precedence(e);
  std::string lhs = to_string(e.args[0]);
  std::string rhs = to_string(e.args[1]);
  if (precedence(e.args[0]) < p) lhs = "(" + lhs + ")";
  if (precedence(e.args[1]) <= p) rhs = "(" + rhs + ")";
  const char* sym = e.op == Op::Add ? "+" : e.op == Op::Sub ? "-" : e.op == Op::Mul ? "*" : "/";
  return lhs + sym + rhs;
}

double evaluate(const RateExpr& e, const ConstantTable& constants,
                const std::function<double(const Expression&)>& count) {
  using Op = RateExpr::Op;
  switch (e.op) {
    case Op::Number: return e.value;
    case Op::Constant: {
      auto it = constants.find(e.name);
      if (it == constants.end()) throw Error(ErrorCode::Rule, "unknown constant '" + e.name + "'");
      return it->second;
    }
    case Op::Count: return count(e.pattern);
    case Op::Sqrt: return std::sqrt(evaluate(e.args[0], constants, count));
    default: break;
  }
  double a = evaluate(e.args[0], constants, count);
  double b = evaluate(e.args[1], constants, count);
  switch (e.op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    default: return a / b;
  }
}

RateExpr substitute(const RateExpr& e,
                    const std::function<std::optional<RateExpr>(const Expression&)>& replace) {
  if (e.op == RateExpr::Op::Count) {
    if (auto r = replace(e.pattern)) return *r;
    return e;
  }
  RateExpr out = e;
  for (auto& a : out.args) a = substitute(a, replace);
  return out;
}

RateExpr fold_constants(const RateExpr& e, const ConstantTable& constants) {
  if (e.op == RateExpr::Op::Constant) {
    auto it = constants.find(e.name);
    return it == constants.end() ? e : RateExpr::number(it->second);
  }
  RateExpr out = e;
  for (auto& a : out.args) a = fold_constants(a, constants);
  return out;
}

void collect_patterns(const RateExpr& e, std::vector<Expression>& out) {
  if (e.op == RateExpr::Op::Count) out.push_back(e.pattern);
  for (const auto& a : e.args) collect_patterns(a, out);
}

void collect_constants(const RateExpr& e, std::vector<std::string>& out) {
  if (e.op == RateExpr::Op::Constant) out.push_back(e.name);
  for (const auto& a : e.args) collect_constants(a, out);
}

namespace detail {

namespace {

RateExpr parse_sum(Cursor& cur, const Signature& sig);

RateExpr parse_atom(Cursor& cur, const Signature& sig) {
  cur.skip_blanks();
  SourceLocation at = cur.loc();
  if (cur.accept('(')) {
    RateExpr e = parse_sum(cur, sig);
    cur.skip_blanks();
    cur.expect(')', "to close parenthesis");
    return e;
  }
  if (cur.accept("#{")) {
    Expression p = parse_expression_at(cur, sig);
    cur.skip_blanks();
    cur.expect('}', "to close pattern count");
    try {
      check_pattern(p, sig);
    } catch (const Error& err) {
      throw Error(err.code(), err.message(), at);
    }
    if (p.empty() || !is_connected(p)) {
      Cursor::fail_at(ErrorCode::Pattern, "counted patterns must be connected and non-empty", at);
    }
    return RateExpr::count(p);
  }
  if (auto v = cur.number()) return RateExpr::number(*v);
  if (auto id = cur.identifier()) {
    if (*id == "sqrt") {
      cur.skip_blanks();
      cur.expect('(', "after sqrt");
      RateExpr e = parse_sum(cur, sig);
      cur.skip_blanks();
      cur.expect(')', "to close sqrt");
      return sqrt(std::move(e));
    }
    return RateExpr::constant(*id);
  }
  cur.fail(ErrorCode::Parse, "expected number, constant, #{pattern} or '('" + cur.found());
}

RateExpr parse_product(Cursor& cur, const Signature& sig) {
  RateExpr e = parse_atom(cur, sig);
  while (true) {
    cur.skip_blanks();
    if (cur.accept('*')) {
      e = std::move(e) * parse_atom(cur, sig);
    } else if (cur.accept('/')) {
      e = std::move(e) / parse_atom(cur, sig);
    } else {
      return e;
    }
  }
}

RateExpr parse_sum(Cursor& cur, const Signature& sig) {
  RateExpr e = parse_product(cur, sig);
  while (true) {
    cur.skip_blanks();
    if (cur.accept('+')) {
      e = std::move(e) + parse_product(cur, sig);
    } else if (cur.peek() == '-' && cur.peek(1) != '>') {
      cur.get();
      e = std::move(e) - parse_product(cur, sig);
    } else {
      return e;
    }
  }
}

}  // namespace

RateExpr parse_rate_at(Cursor& cur, const Signature& sig) { return parse_sum(cur, sig); }

}  // namespace detail

RateExpr parse_rate_expr(std::string_view text, const Signature& sig) {
  detail::Cursor cur(text);
  RateExpr e = detail::parse_rate_at(cur, sig);
  cur.skip_ws();
  if (!cur.eof()) cur.fail(ErrorCode::Parse, "unexpected trailing input" + cur.found());
  return e;
}

}  // namespace kred
