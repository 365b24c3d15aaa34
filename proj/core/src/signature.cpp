#include "kred/signature.hpp"

#include <algorithm>
#include <set>

#include "kred/errors.hpp"
#include "syntax.hpp"

namespace kred {

bool AgentSignature::has_site(std::string_view site) const {
  return std::find(sites.begin(), sites.end(), site) != sites.end();
}

bool AgentSignature::is_internal(std::string_view site) const {
  return internal_values.find(site) != internal_values.end();
}

bool AgentSignature::allows_state(std::string_view site, std::string_view state) const {
  auto it = internal_values.find(site);
  if (it == internal_values.end()) return false;
  return std::find(it->second.begin(), it->second.end(), state) != it->second.end();
}

bool operator==(const AgentSignature& a, const AgentSignature& b) {
  return a.sites == b.sites && a.internal_values == b.internal_values;
}

void Signature::add(const std::string& name, AgentSignature agent) {
  if (!agents_.emplace(name, std::move(agent)).second) {
    throw Error(ErrorCode::Signature, "duplicate declaration of agent '" + name + "'");
  }
}

const AgentSignature* Signature::find(std::string_view name) const {
  auto it = agents_.find(name);
  return it == agents_.end() ? nullptr : &it->second;
}

Signature Signature::restricted_to(const std::vector<std::string>& used) const {
  Signature out;
  for (const auto& [name, agent] : agents_) {
    if (std::find(used.begin(), used.end(), name) != used.end()) out.agents_.emplace(name, agent);
  }
  return out;
}

bool operator==(const Signature& a, const Signature& b) { return a.agents_ == b.agents_; }

namespace detail {

std::pair<std::string, AgentSignature> parse_agent_declaration(Cursor& cur) {
  cur.skip_blanks();
  SourceLocation at = cur.loc();
  auto name = cur.identifier();
  if (!name) cur.fail(ErrorCode::Parse, "expected agent name in declaration" + cur.found());
  AgentSignature agent;
  cur.skip_blanks();
  if (!cur.accept('(')) return {*name, agent};
  std::set<std::string> seen;
  cur.skip_blanks();
  if (cur.accept(')')) return {*name, agent};
  while (true) {
    cur.skip_blanks();
    SourceLocation site_at = cur.loc();
    auto site = cur.identifier();
    if (!site) cur.fail(ErrorCode::Parse, "expected site name" + cur.found());
    if (!seen.insert(*site).second) {
      Cursor::fail_at(ErrorCode::Signature,
                      "site '" + *site + "' declared twice for agent '" + *name + "'", site_at);
    }
    agent.sites.push_back(*site);
    while (cur.accept('~')) {
      auto state = cur.token();
      if (!state) cur.fail(ErrorCode::Parse, "expected internal state after '~'" + cur.found());
      auto& values = agent.internal_values[*site];
      if (std::find(values.begin(), values.end(), *state) != values.end()) {
        cur.fail(ErrorCode::Signature, "internal state '" + *state + "' listed twice");
      }
      values.push_back(*state);
    }
    cur.skip_blanks();
    if (cur.accept(',')) continue;
    cur.expect(')', "to close agent declaration");
    break;
  }
  (void)at;
  return {*name, agent};
}

}  // namespace detail

Signature parse_signature(std::string_view text) {
  Signature sig;
  detail::Cursor cur(text);
  while (true) {
    cur.skip_ws();
    if (cur.eof()) break;
    SourceLocation at = cur.loc();
    if (!cur.accept("%agent:")) cur.fail(ErrorCode::Parse, "expected '%agent:'" + cur.found());
    auto [name, agent] = detail::parse_agent_declaration(cur);
    if (sig.contains(name)) {
      throw Error(ErrorCode::Signature, "duplicate declaration of agent '" + name + "'", at);
    }
    sig.add(name, std::move(agent));
  }
  return sig;
}

std::string to_string(const Signature& sig) {
  std::string out;
  for (const auto& [name, agent] : sig.agents()) {
    out += "%agent: " + name + "(";
    for (std::size_t i = 0; i < agent.sites.size(); ++i) {
      if (i) out += ",";
      out += agent.sites[i];
      auto it = agent.internal_values.find(agent.sites[i]);
      if (it != agent.internal_values.end()) {
        for (const auto& v : it->second) out += "~" + v;
      }
    }
    out += ")\n";
  }
  return out;
}

}  // namespace kred
