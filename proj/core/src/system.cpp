#include "kred/system.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "kred/errors.hpp"
#include "syntax.hpp"

namespace kred {

void KappaSystem::add_init(const Expression& mixture, long long count) {
  check_pattern(mixture, signature);
  for (const auto& c : components(mixture)) {
    Species sp(c, signature);
    auto it = std::find_if(init.begin(), init.end(),
                           [&](const InitEntry& e) { return e.species == sp; });
    if (it == init.end()) {
      init.push_back({sp, count});
    } else {
      it->count += count;
    }
  }
}

long long KappaSystem::initial_count(const Species& sp) const {
  for (const auto& e : init) {
    if (e.species == sp) return e.count;
  }
  return 0;
}

ConstantTable KappaSystem::constant_table() const {
  ConstantTable out;
  for (const auto& c : constants) out[c.name] = c.value;
  return out;
}

const Rule* KappaSystem::find_rule(std::string_view name) const {
  for (const auto& r : rules) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

bool KappaSystem::has_constant(std::string_view name) const {
  return std::any_of(constants.begin(), constants.end(),
                     [&](const Constant& c) { return c.name == name; });
}

std::vector<std::string> KappaSystem::used_agents() const {
  std::set<std::string> names;
  auto take = [&](const Expression& e) {
    for (const auto& entry : e.entries) {
      if (entry) names.insert(entry->name);
    }
  };
  for (const auto& r : rules) {
    take(r.lhs);
    take(r.rhs);
    if (r.rate.is_closed()) {
      std::vector<Expression> ps;
      collect_patterns(r.rate.expr, ps);
      for (const auto& p : ps) take(p);
    }
  }
  for (const auto& e : init) take(e.species.expression());
  for (const auto& o : observables) {
    if (o.closed) {
      std::vector<Expression> ps;
      collect_patterns(o.expr, ps);
      for (const auto& p : ps) take(p);
    } else {
      take(o.pattern);
    }
  }
  return {names.begin(), names.end()};
}

namespace {

using detail::Cursor;

// Blank out comments while keeping line/column positions intact.
std::string strip_comments(std::string_view text) {
  std::string out(text);
  bool in_comment = false;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == '\n') {
      in_comment = false;
      continue;
    }
    if (!in_comment && out[i] == '#' && (i + 1 >= out.size() || out[i + 1] != '{')) {
      in_comment = true;
    }
    if (in_comment) out[i] = ' ';
  }
  return out;
}

struct RuleHead {
  std::string name;
  bool named = false;
};

class ModelParser {
 public:
  explicit ModelParser(std::string_view text) : text_(strip_comments(text)) {}

  KappaSystem run() {
    // Declarations first so that rules may precede the agents they use.
    for_each_line([&](Cursor& cur) {
      if (cur.accept("%agent:")) {
        SourceLocation at = cur.loc();
        auto [name, agent] = detail::parse_agent_declaration(cur);
        if (sys_.signature.contains(name)) {
          throw Error(ErrorCode::Signature, "duplicate declaration of agent '" + name + "'", at);
        }
        sys_.signature.add(name, std::move(agent));
        end_of_line(cur);
      } else if (cur.accept("%const:")) {
        cur.skip_blanks();
        SourceLocation at = cur.loc();
        auto name = cur.identifier();
        if (!name) cur.fail(ErrorCode::Parse, "expected constant name" + cur.found());
        if (sys_.has_constant(*name)) {
          throw Error(ErrorCode::Parse, "constant '" + *name + "' defined twice", at);
        }
        cur.skip_blanks();
        auto v = cur.number();
        if (!v) cur.fail(ErrorCode::Parse, "expected a numeric value" + cur.found());
        sys_.constants.push_back({*name, *v});
        end_of_line(cur);
      }
    });
    for_each_line([&](Cursor& cur) {
      if (cur.at("%agent:") || cur.at("%const:")) return;
      if (cur.accept("%init:")) {
        parse_init(cur);
      } else if (cur.accept("%obs:")) {
        parse_obs(cur);
      } else if (cur.peek() == '%') {
        cur.fail(ErrorCode::Parse, "unknown directive");
      } else {
        parse_rule(cur);
      }
    });
    std::set<std::string> names;
    for (const auto& r : sys_.rules) {
      if (!names.insert(r.name).second) {
        throw Error(ErrorCode::Rule, "rule name '" + r.name + "' used twice", r.loc);
      }
    }
    std::set<std::string> obs;
    for (const auto& o : sys_.observables) {
      if (!obs.insert(o.name).second) {
        throw Error(ErrorCode::Parse, "observable '" + o.name + "' defined twice");
      }
    }
    check_constants();
    validate_system(sys_);
    return std::move(sys_);
  }

 private:
  template <typename F>
  void for_each_line(F&& f) {
    std::size_t start = 0;
    int line = 1;
    while (start <= text_.size()) {
      std::size_t end = text_.find('\n', start);
      if (end == std::string::npos) end = text_.size();
      std::string_view body(text_.data() + start, end - start);
      Cursor cur(body, {line, 1});
      cur.skip_blanks();
      if (!cur.eof()) f(cur);
      start = end + 1;
      ++line;
    }
  }

  static void end_of_line(Cursor& cur) {
    cur.skip_blanks();
    if (!cur.eof()) cur.fail(ErrorCode::Parse, "unexpected trailing input" + cur.found());
  }

  Expression expression(Cursor& cur) {
    cur.skip_blanks();
    return detail::parse_expression_at(cur, sys_.signature);
  }

  void parse_init(Cursor& cur) {
    cur.skip_blanks();
    auto n = cur.integer();
    if (!n) cur.fail(ErrorCode::Parse, "expected an initial count" + cur.found());
    SourceLocation at = cur.loc();
    Expression e = expression(cur);
    end_of_line(cur);
    try {
      sys_.add_init(e, *n);
    } catch (const Error& err) {
      throw Error(err.code(), "initial mixture: " + err.message(), at);
    }
  }

  void parse_obs(Cursor& cur) {
    cur.skip_blanks();
    Observable o;
    if (cur.accept('\'')) {
      while (!cur.eof() && cur.peek() != '\'') o.name += cur.get();
      cur.expect('\'', "to close observable name");
    } else {
      auto name = cur.identifier();
      if (!name) cur.fail(ErrorCode::Parse, "expected observable name" + cur.found());
      o.name = *name;
    }
    cur.skip_blanks();
    SourceLocation at = cur.loc();
    if (cur.accept("@@")) {
      o.closed = true;
      o.expr = detail::parse_rate_at(cur, sys_.signature);
    } else {
      o.pattern = expression(cur);
      try {
        check_pattern(o.pattern, sys_.signature);
      } catch (const Error& err) {
        throw Error(err.code(), "observable '" + o.name + "': " + err.message(), at);
      }
      o.pattern = normalize(o.pattern);
      if (o.pattern.empty() || !is_connected(o.pattern)) {
        throw Error(ErrorCode::Pattern, "observable '" + o.name + "' must be a connected pattern",
                    at);
      }
    }
    end_of_line(cur);
    sys_.observables.push_back(std::move(o));
  }

  RuleHead rule_head(Cursor& cur) {
    RuleHead head;
    if (cur.accept('\'')) {
      while (!cur.eof() && cur.peek() != '\'') head.name += cur.get();
      cur.expect('\'', "to close rule name");
      head.named = true;
      return head;
    }
    std::size_t i = 0;
    while (Cursor::ident_char(cur.peek(i))) ++i;
    std::size_t j = i;
    while (cur.peek(j) == ' ' || cur.peek(j) == '\t') ++j;
    if (i > 0 && Cursor::ident_start(cur.peek(0)) && cur.peek(j) == ':') {
      head.name = *cur.identifier();
      cur.skip_blanks();
      cur.get();
      head.named = true;
    }
    return head;
  }

  double rate_value(Cursor& cur) {
    cur.skip_blanks();
    if (auto v = cur.number()) return *v;
    SourceLocation at = cur.loc();
    if (auto id = cur.identifier()) {
      for (const auto& c : sys_.constants) {
        if (c.name == *id) return c.value;
      }
      Cursor::fail_at(ErrorCode::Parse, "unknown constant '" + *id + "'", at);
    }
    cur.fail(ErrorCode::Parse, "expected a rate constant" + cur.found());
  }

  void parse_rule(Cursor& cur) {
    SourceLocation at = cur.loc();
    RuleHead head = rule_head(cur);
    Rule r;
    r.loc = at;
    r.lhs = expression(cur);
    cur.skip_blanks();
    bool reversible = false;
    if (cur.accept("<->")) {
      reversible = true;
    } else if (!cur.accept("->")) {
      cur.fail(ErrorCode::Parse, "expected '->' or '<->'" + cur.found());
    }
    r.rhs = expression(cur);
    cur.skip_blanks();
    if (!head.named) head.name = "r" + std::to_string(sys_.rules.size() + 1);
    if (cur.accept("@@")) {
      if (reversible) cur.fail(ErrorCode::Parse, "a reversible rule needs two '@' rates");
      r.rate = RateLaw::closed(detail::parse_rate_at(cur, sys_.signature));
    } else {
      cur.expect('@', "before the rate");
      r.rate = RateLaw::mass_action(rate_value(cur));
    }
    if (reversible) {
      cur.skip_blanks();
      cur.expect(',', "between forward and reverse rates");
      Rule back;
      back.loc = at;
      back.lhs = r.rhs;
      back.rhs = r.lhs;
      back.rate = RateLaw::mass_action(rate_value(cur));
      back.name = head.name + "_rev";
      r.name = head.name + "_fwd";
      end_of_line(cur);
      sys_.rules.push_back(std::move(r));
      sys_.rules.push_back(std::move(back));
      return;
    }
    end_of_line(cur);
    r.name = head.name;
    sys_.rules.push_back(std::move(r));
  }

  void check_constants() const {
    auto table = sys_.constant_table();
    auto check = [&](const RateExpr& e, const std::string& where, SourceLocation loc) {
      std::vector<std::string> names;
      collect_constants(e, names);
      for (const auto& n : names) {
        if (!table.count(n)) {
          throw Error(ErrorCode::Parse, where + " uses undefined constant '" + n + "'", loc);
        }
      }
    };
    for (const auto& r : sys_.rules) {
      if (r.rate.is_closed()) check(r.rate.expr, "rule '" + r.name + "'", r.loc);
    }
    for (const auto& o : sys_.observables) {
      if (o.closed) check(o.expr, "observable '" + o.name + "'", {});
    }
  }

  std::string text_;
  KappaSystem sys_;
};

}  // namespace

KappaSystem parse_model(std::string_view text) { return ModelParser(text).run(); }

KappaSystem load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string print_model(const KappaSystem& sys) {
  std::string out = to_string(sys.signature);
  for (const auto& c : sys.constants) out += "%const: " + c.name + " " + format_number(c.value) + "\n";
  for (const auto& e : sys.init) {
    out += "%init: " + std::to_string(e.count) + " " + to_string(e.species.expression()) + "\n";
  }
  for (const auto& o : sys.observables) {
    out += "%obs: " + o.name + " ";
    out += o.closed ? "@@ " + to_string(o.expr) : to_string(o.pattern);
    out += "\n";
  }
  for (const auto& r : sys.rules) {
    out += r.name + ": " + to_string(r) + "\n";
  }
  return out;
}

std::vector<EditScript> validate_system(const KappaSystem& sys) {
  std::vector<EditScript> out;
  out.reserve(sys.rules.size());
  for (const auto& r : sys.rules) out.push_back(validate_rule(r, sys.signature));
  return out;
}

}  // namespace kred
