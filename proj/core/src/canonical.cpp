#include "kred/canonical.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>

#include "kred/errors.hpp"

namespace kred {

namespace {

std::vector<int> sites_by_name(const Agent& a) {
  std::vector<int> idx(a.sites.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](int x, int y) { return a.sites[x].name < a.sites[y].name; });
  return idx;
}

std::string local_invariant(const LinkedGraph& g, int a) {
  const Agent& agent = g.agents[a];
  std::string out = agent.name + "(";
  for (int s : sites_by_name(agent)) {
    const Site& site = agent.sites[s];
    out += site.name;
    if (site.internal) out += "~" + *site.internal;
    if (site.binding.is_wildcard()) out += "!_";
    if (const auto& p = g.partner[a][s]) {
      out += "!" + g.agents[p->agent].name + "." + g.agents[p->agent].sites[p->site].name;
    }
    out += ",";
  }
  return out + ")";
}

template <typename T>
std::vector<int> rank(const std::vector<T>& keys) {
  std::vector<T> sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> out(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    out[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), keys[i]) -
                              sorted.begin());
  }
  return out;
}

std::size_t count_distinct(const std::vector<int>& v) {
  std::vector<int> s = v;
  std::sort(s.begin(), s.end());
  return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
}

// Colour refinement: each agent's colour is repeatedly combined with the
// colours seen through its bonds until the partition stops splitting.
std::vector<int> refine(const LinkedGraph& g) {
  std::vector<std::string> local(g.size());
  for (std::size_t a = 0; a < g.size(); ++a) local[a] = local_invariant(g, static_cast<int>(a));
  std::vector<int> color = rank(local);
  std::size_t classes = count_distinct(color);
  while (classes < g.size()) {
    using Key = std::pair<int, std::vector<std::pair<std::string, int>>>;
    std::vector<Key> keys(g.size());
    for (std::size_t a = 0; a < g.size(); ++a) {
      keys[a].first = color[a];
      for (std::size_t s = 0; s < g.agents[a].sites.size(); ++s) {
        if (const auto& p = g.partner[a][s]) {
          keys[a].second.emplace_back(g.agents[a].sites[s].name, color[p->agent]);
        }
      }
      std::sort(keys[a].second.begin(), keys[a].second.end());
    }
    std::vector<int> next = rank(keys);
    std::size_t next_classes = count_distinct(next);
    color = std::move(next);
    if (next_classes == classes) break;
    classes = next_classes;
  }
  return color;
}

// A rooted traversal that visits sites in name order is fully determined by
// the root, so the serialization below is a complete invariant once the
// root is fixed.
std::vector<int> traverse(const LinkedGraph& g, int root) {
  std::vector<int> order{root};
  std::vector<bool> seen(g.size(), false);
  seen[root] = true;
  for (std::size_t i = 0; i < order.size(); ++i) {
    int a = order[i];
    for (int s : sites_by_name(g.agents[a])) {
      const auto& p = g.partner[a][s];
      if (p && !seen[p->agent]) {
        seen[p->agent] = true;
        order.push_back(p->agent);
      }
    }
  }
  return order;
}

std::string serialize(const LinkedGraph& g, const std::vector<int>& order) {
  std::vector<int> pos(g.size(), -1);
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
  std::string out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    int a = order[i];
    const Agent& agent = g.agents[a];
    if (i) out += ",";
    out += agent.name + "(";
    bool first = true;
    for (int s : sites_by_name(agent)) {
      const Site& site = agent.sites[s];
      if (!first) out += ",";
      first = false;
      out += site.name;
      if (site.internal) out += "~" + *site.internal;
      if (site.binding.is_wildcard()) out += "!_";
      if (const auto& p = g.partner[a][s]) {
        out += "!" + std::to_string(pos[p->agent]) + "." + g.agents[p->agent].sites[p->site].name;
      }
    }
    out += ")";
  }
  return out;
}

CanonicalForm canonical_form_linked(const LinkedGraph& g) {
  CanonicalForm best;
  if (g.size() == 0) return best;
  std::vector<int> color = refine(g);
  int min_color = *std::min_element(color.begin(), color.end());
  bool have = false;
  for (std::size_t r = 0; r < g.size(); ++r) {
    if (color[r] != min_color) continue;
    auto order = traverse(g, static_cast<int>(r));
    if (order.size() != g.size()) {
      throw Error(ErrorCode::Pattern, "canonical form requires a connected expression");
    }
    std::string key = serialize(g, order);
    if (!have || key < best.key) {
      best.key = std::move(key);
      best.order = std::move(order);
      best.automorphisms = 1;
      have = true;
    } else if (key == best.key) {
      ++best.automorphisms;
    }
  }
  return best;
}

Expression reorder(const LinkedGraph& g, const std::vector<int>& order) {
  LinkedGraph out;
  std::vector<int> pos(g.size(), -1);
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
  for (int a : order) {
    auto idx = sites_by_name(g.agents[a]);
    std::vector<int> site_pos(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) site_pos[idx[k]] = static_cast<int>(k);
    Agent agent{g.agents[a].name, {}};
    std::vector<std::optional<SiteRef>> partners;
    for (int s : idx) {
      agent.sites.push_back(g.agents[a].sites[s]);
      partners.push_back(g.partner[a][s]);
    }
    out.agents.push_back(std::move(agent));
    out.partner.push_back(std::move(partners));
  }
  // Partner site indices refer to the old site order; remap them.
  for (auto& row : out.partner) {
    for (auto& p : row) {
      if (!p) continue;
      auto idx = sites_by_name(g.agents[p->agent]);
      int k = static_cast<int>(std::find(idx.begin(), idx.end(), p->site) - idx.begin());
      p = SiteRef{pos[p->agent], k};
    }
  }
  return unlink(out);
}

}  // namespace

CanonicalForm canonical_form(const Expression& e) {
  return canonical_form_linked(link(normalize(e)));
}

std::string canonical_key(const Expression& e) {
  std::vector<std::string> keys;
  for (const auto& c : components(e)) keys.push_back(canonical_form(c).key);
  std::sort(keys.begin(), keys.end());
  std::string out;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i) out += " | ";
    out += keys[i];
  }
  return out;
}

bool structurally_equal(const Expression& a, const Expression& b) {
  return canonical_key(a) == canonical_key(b);
}

std::size_t automorphism_count(const Expression& e) {
  std::map<std::string, std::size_t> multiplicity;
  std::size_t out = 1;
  for (const auto& c : components(e)) {
    auto f = canonical_form(c);
    out *= f.automorphisms;
    out *= ++multiplicity[f.key];
  }
  return out;
}

Expression canonical_expression(const Expression& e) {
  std::vector<std::pair<std::string, Expression>> parts;
  for (const auto& c : components(e)) {
    LinkedGraph g = link(c);
    auto f = canonical_form_linked(g);
    parts.emplace_back(f.key, reorder(g, f.order));
  }
  std::stable_sort(parts.begin(), parts.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<Expression> exprs;
  for (auto& p : parts) exprs.push_back(std::move(p.second));
  return normalize(concat(exprs));
}

Species::Species(const Expression& e, const Signature& sig) {
  check_mixture(e, sig);
  auto comps = components(e);
  if (comps.size() != 1) {
    throw Error(ErrorCode::Pattern, "a species must be a single connected component, got " +
                                        std::to_string(comps.size()));
  }
  LinkedGraph g = link(comps.front());
  auto f = canonical_form_linked(g);
  key_ = f.key;
  aut_ = f.automorphisms;
  expr_ = reorder(g, f.order);
  // Present sites in declaration order.
  for (auto& entry : expr_.entries) {
    const AgentSignature* as = sig.find(entry->name);
    std::vector<Site> sites;
    for (const auto& name : as->sites) sites.push_back(*entry->find(name));
    entry->sites = std::move(sites);
  }
  expr_ = normalize(expr_);
}

std::size_t occurrence_count(const Species& sp, const Expression& p) {
  std::size_t n = 0;
  for (const auto& c : components(p)) {
    if (c.entries.size() == sp.size() && canonical_form(c).key == sp.key()) ++n;
  }
  return n;
}

}  // namespace kred
