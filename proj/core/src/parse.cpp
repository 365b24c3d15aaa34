#include "kred/parse.hpp"

#include <map>
#include <set>

#include "kred/errors.hpp"
#include "syntax.hpp"

namespace kred {
namespace detail {

namespace {

Agent parse_agent(Cursor& cur, const Signature& sig) {
  SourceLocation at = cur.loc();
  auto name = cur.identifier();
  if (!name) cur.fail(ErrorCode::Parse, "expected agent name" + cur.found());
  const AgentSignature* as = sig.find(*name);
  if (!as) Cursor::fail_at(ErrorCode::Signature, "agent '" + *name + "' is not declared", at);
  Agent agent{*name, {}};
  if (!cur.accept('(')) return agent;
  cur.skip_blanks();
  if (cur.accept(')')) return agent;
  std::set<std::string> seen;
  while (true) {
    cur.skip_blanks();
    SourceLocation site_at = cur.loc();
    auto site_name = cur.identifier();
    if (!site_name) cur.fail(ErrorCode::Parse, "expected site name" + cur.found());
    if (!as->has_site(*site_name)) {
      Cursor::fail_at(ErrorCode::Signature,
                      "agent '" + *name + "' has no site '" + *site_name + "'", site_at);
    }
    if (!seen.insert(*site_name).second) {
      Cursor::fail_at(ErrorCode::Pattern,
                      "site '" + *site_name + "' occurs twice in the interface of '" + *name + "'",
                      site_at);
    }
    Site site{*site_name, std::nullopt, Binding::free()};
    bool got_state = false;
    bool got_bond = false;
    while (true) {
      if (!got_state && cur.peek() == '~') {
        SourceLocation state_at = cur.loc();
        cur.get();
        auto state = cur.token();
        if (!state) cur.fail(ErrorCode::Parse, "expected internal state after '~'" + cur.found());
        if (!as->allows_state(*site_name, *state)) {
          Cursor::fail_at(ErrorCode::Signature,
                          "'" + *state + "' is not an internal state of " + *name + "." +
                              *site_name,
                          state_at);
        }
        site.internal = *state;
        got_state = true;
      } else if (!got_bond && cur.peek() == '!') {
        cur.get();
        if (cur.accept('_')) {
          site.binding = Binding::wildcard();
        } else if (auto label = cur.integer()) {
          if (*label < 1) cur.fail(ErrorCode::Parse, "bond labels are positive integers");
          site.binding = Binding::bound(static_cast<int>(*label));
        } else {
          cur.fail(ErrorCode::Parse, "expected bond label or '_' after '!'" + cur.found());
        }
        got_bond = true;
      } else {
        break;
      }
    }
    agent.sites.push_back(std::move(site));
    cur.skip_blanks();
    if (cur.accept(',')) continue;
    cur.expect(')', "to close the interface of '" + *name + "'");
    break;
  }
  return agent;
}

}  // namespace

Expression parse_expression_at(Cursor& cur, const Signature& sig) {
  Expression e;
  std::map<int, int> uses;
  while (true) {
    cur.skip_blanks();
    SourceLocation at = cur.loc();
    if (cur.peek() == '.' && !Cursor::ident_char(cur.peek(1))) {
      cur.get();
      e.entries.emplace_back(std::nullopt);
    } else {
      long long count = 1;
      if (auto n = cur.integer()) {
        count = *n;
        cur.skip_blanks();
        if (count < 1) Cursor::fail_at(ErrorCode::Parse, "agent count must be positive", at);
      }
      Agent a = parse_agent(cur, sig);
      bool labelled = false;
      for (const auto& s : a.sites) {
        if (!s.binding.is_bound()) continue;
        labelled = true;
        if (++uses[s.binding.label] > 2) {
          Cursor::fail_at(ErrorCode::Pattern,
                          "bond label " + std::to_string(s.binding.label) +
                              " occurs more than twice",
                          at);
        }
      }
      if (labelled && count > 1) {
        Cursor::fail_at(ErrorCode::Parse, "a count prefix cannot be applied to a bonded agent",
                        at);
      }
      for (long long i = 0; i < count; ++i) e.entries.emplace_back(a);
    }
    cur.skip_blanks();
    if (!cur.accept(',')) break;
  }
  return e;
}

}  // namespace detail

Expression parse_expression(std::string_view text, const Signature& sig) {
  detail::Cursor cur(text);
  cur.skip_ws();
  Expression e = detail::parse_expression_at(cur, sig);
  cur.skip_ws();
  if (!cur.eof()) cur.fail(ErrorCode::Parse, "unexpected trailing input" + cur.found());
  return e;
}

}  // namespace kred
