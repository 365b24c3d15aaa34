#include "kred/expression.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "kred/errors.hpp"

namespace kred {

const Site* Agent::find(std::string_view site) const {
  for (const auto& s : sites) {
    if (s.name == site) return &s;
  }
  return nullptr;
}

Site* Agent::find(std::string_view site) {
  for (auto& s : sites) {
    if (s.name == site) return &s;
  }
  return nullptr;
}

std::size_t Expression::agent_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.has_value(); }));
}

std::vector<Agent> Expression::agents() const {
  std::vector<Agent> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    if (e) out.push_back(*e);
  }
  return out;
}

LinkedGraph link(const Expression& e) {
  LinkedGraph g;
  g.agents = e.agents();
  g.partner.resize(g.agents.size());
  std::map<int, std::vector<SiteRef>> where;
  for (std::size_t a = 0; a < g.agents.size(); ++a) {
    g.partner[a].resize(g.agents[a].sites.size());
    for (std::size_t s = 0; s < g.agents[a].sites.size(); ++s) {
      const auto& b = g.agents[a].sites[s].binding;
      if (!b.is_bound()) continue;
      auto& refs = where[b.label];
      refs.push_back({static_cast<int>(a), static_cast<int>(s)});
      if (refs.size() > 2) {
        throw Error(ErrorCode::Pattern,
                    "bond label " + std::to_string(b.label) + " occurs more than twice");
      }
    }
  }
  for (const auto& [label, refs] : where) {
    if (refs.size() != 2) continue;
    g.partner[refs[0].agent][refs[0].site] = refs[1];
    g.partner[refs[1].agent][refs[1].site] = refs[0];
  }
  return g;
}

Expression unlink(const LinkedGraph& g) {
  Expression out;
  std::map<SiteRef, int> label_of;
  int next = 1;
  for (std::size_t a = 0; a < g.agents.size(); ++a) {
    Agent agent = g.agents[a];
    for (std::size_t s = 0; s < agent.sites.size(); ++s) {
      auto& site = agent.sites[s];
      if (!site.binding.is_bound()) continue;
      SiteRef here{static_cast<int>(a), static_cast<int>(s)};
      const auto& p = g.partner[a][s];
      if (!p) {
        site.binding = Binding::bound(next++);
        continue;
      }
      auto it = label_of.find(here);
      if (it != label_of.end()) {
        site.binding = Binding::bound(it->second);
      } else {
        label_of[*p] = next;
        site.binding = Binding::bound(next++);
      }
    }
    out.entries.emplace_back(std::move(agent));
  }
  return out;
}

Expression normalize(const Expression& e) {
  LinkedGraph g = link(e);
  for (std::size_t a = 0; a < g.agents.size(); ++a) {
    for (std::size_t s = 0; s < g.agents[a].sites.size(); ++s) {
      auto& b = g.agents[a].sites[s].binding;
      if (b.is_bound() && !g.partner[a][s]) b = Binding::free();
    }
  }
  return unlink(g);
}

namespace {

std::vector<int> component_ids(const LinkedGraph& g) {
  std::vector<int> parent(g.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t a = 0; a < g.size(); ++a) {
    for (const auto& p : g.partner[a]) {
      if (p) parent[root(static_cast<int>(a))] = root(p->agent);
    }
  }
  std::vector<int> id(g.size(), -1);
  std::map<int, int> dense;
  for (std::size_t a = 0; a < g.size(); ++a) {
    int r = root(static_cast<int>(a));
    auto [it, fresh] = dense.emplace(r, static_cast<int>(dense.size()));
    id[a] = it->second;
  }
  return id;
}

}  // namespace

std::vector<Expression> components(const Expression& e) {
  LinkedGraph g = link(normalize(e));
  auto id = component_ids(g);
  int n = id.empty() ? 0 : *std::max_element(id.begin(), id.end()) + 1;
  std::vector<Expression> out(n);
  for (std::size_t a = 0; a < g.size(); ++a) out[id[a]].entries.emplace_back(g.agents[a]);
  for (auto& c : out) c = normalize(c);
  return out;
}

bool is_connected(const Expression& e) { return components(e).size() <= 1; }

Expression concat(const std::vector<Expression>& parts) {
  Expression out;
  int offset = 0;
  for (const auto& part : parts) {
    int top = 0;
    for (const auto& entry : part.entries) {
      if (!entry) {
        out.entries.emplace_back(std::nullopt);
        continue;
      }
      Agent a = *entry;
      for (auto& s : a.sites) {
        if (s.binding.is_bound()) {
          top = std::max(top, s.binding.label);
          s.binding.label += offset;
        }
      }
      out.entries.emplace_back(std::move(a));
    }
    offset += top;
  }
  return out;
}

std::string to_string(const Agent& a) {
  std::string out = a.name + "(";
  for (std::size_t i = 0; i < a.sites.size(); ++i) {
    const auto& s = a.sites[i];
    if (i) out += ",";
    out += s.name;
    if (s.internal) out += "~" + *s.internal;
    if (s.binding.is_wildcard()) out += "!_";
    if (s.binding.is_bound()) out += "!" + std::to_string(s.binding.label);
  }
  return out + ")";
}

namespace {

bool has_labels(const Agent& a) {
  return std::any_of(a.sites.begin(), a.sites.end(),
                     [](const Site& s) { return s.binding.is_bound(); });
}

}  // namespace

std::string to_string(const Expression& e) {
  std::string out;
  std::size_t i = 0;
  while (i < e.entries.size()) {
    if (!out.empty()) out += ",";
    const auto& entry = e.entries[i];
    if (!entry) {
      out += ".";
      ++i;
      continue;
    }
    std::size_t run = 1;
    if (!has_labels(*entry)) {
      while (i + run < e.entries.size() && e.entries[i + run] == entry) ++run;
    }
    if (run > 1) out += std::to_string(run) + " ";
    out += to_string(*entry);
    i += run;
  }
  return out;
}

void check_pattern(const Expression& e, const Signature& sig) {
  std::map<int, int> uses;
  for (const auto& entry : e.entries) {
    if (!entry) continue;
    const Agent& a = *entry;
    const AgentSignature* as = sig.find(a.name);
    if (!as) throw Error(ErrorCode::Signature, "agent '" + a.name + "' is not declared");
    std::set<std::string> seen;
    for (const auto& s : a.sites) {
      if (!seen.insert(s.name).second) {
        throw Error(ErrorCode::Pattern,
                    "site '" + s.name + "' occurs twice in the interface of '" + a.name + "'");
      }
      if (!as->has_site(s.name)) {
        throw Error(ErrorCode::Signature,
                    "agent '" + a.name + "' has no site '" + s.name + "'");
      }
      if (s.internal && !as->allows_state(s.name, *s.internal)) {
        throw Error(ErrorCode::Signature, "'" + *s.internal + "' is not an internal state of " +
                                              a.name + "." + s.name);
      }
      if (s.binding.is_bound()) ++uses[s.binding.label];
    }
  }
  for (const auto& [label, n] : uses) {
    if (n != 2) {
      throw Error(ErrorCode::Pattern, "bond label " + std::to_string(label) + " occurs " +
                                          std::to_string(n) + " time(s); expected exactly 2");
    }
  }
}

bool is_fully_specified(const Agent& a, const Signature& sig) {
  const AgentSignature* as = sig.find(a.name);
  if (!as || a.sites.size() != as->sites.size()) return false;
  for (const auto& name : as->sites) {
    const Site* s = a.find(name);
    if (!s || s->binding.is_wildcard()) return false;
    if (as->is_internal(name) != s->internal.has_value()) return false;
  }
  return true;
}

void check_mixture(const Expression& e, const Signature& sig) {
  check_pattern(e, sig);
  for (const auto& entry : e.entries) {
    if (!entry) throw Error(ErrorCode::Pattern, "a mixture cannot contain '.'");
    if (!is_fully_specified(*entry, sig)) {
      throw Error(ErrorCode::Pattern, "agent " + to_string(*entry) +
                                          " does not document its full interface");
    }
  }
}

bool is_mixture(const Expression& e, const Signature& sig) {
  try {
    check_mixture(e, sig);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace kred
