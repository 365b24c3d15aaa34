#include "rule_edit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "kred/embedding.hpp"

namespace kred::detail {

bool SideView::species_only() const {
  return std::all_of(species.begin(), species.end(), [](const auto& s) { return s.has_value(); });
}

std::size_t SideView::count(const Species& sp) const {
  return static_cast<std::size_t>(std::count_if(
      species.begin(), species.end(), [&](const auto& s) { return s && *s == sp; }));
}

std::vector<Species> SideView::species_list() const {
  std::vector<Species> out;
  for (const auto& s : species) out.push_back(*s);
  return out;
}

std::vector<int> agent_entries(const Expression& e) {
  std::vector<int> out;
  for (std::size_t i = 0; i < e.entries.size(); ++i) {
    if (e.entries[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

SideView view(const Expression& side, const Signature& sig) {
  SideView v;
  LinkedGraph g = link(normalize(side));
  auto pos = agent_entries(side);
  std::vector<int> comp(g.size(), -1);
  int n = 0;
  for (std::size_t a = 0; a < g.size(); ++a) {
    if (comp[a] != -1) continue;
    std::vector<int> stack{static_cast<int>(a)};
    comp[a] = n;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (const auto& p : g.partner[x]) {
        if (p && comp[p->agent] == -1) {
          comp[p->agent] = n;
          stack.push_back(p->agent);
        }
      }
    }
    ++n;
  }
  v.entries.resize(n);
  std::vector<Expression> parts(n);
  for (std::size_t a = 0; a < g.size(); ++a) {
    v.entries[comp[a]].push_back(pos[a]);
    parts[comp[a]].entries.emplace_back(side.entries[pos[a]]);
  }
  for (auto& p : parts) {
    Expression c = normalize(p);
    v.comps.push_back(c);
    if (is_mixture(c, sig)) {
      v.species.emplace_back(Species(c, sig));
    } else {
      v.species.emplace_back(std::nullopt);
    }
  }
  return v;
}

void compact(Rule& r) {
  auto& l = r.lhs.entries;
  auto& rr = r.rhs.entries;
  std::size_t n = std::max(l.size(), rr.size());
  std::vector<std::optional<Agent>> nl;
  std::vector<std::optional<Agent>> nr;
  for (std::size_t i = 0; i < n; ++i) {
    bool has_l = i < l.size() && l[i];
    bool has_r = i < rr.size() && rr[i];
    if (!has_l && !has_r) continue;
    nl.push_back(i < l.size() ? l[i] : std::nullopt);
    nr.push_back(i < rr.size() ? rr[i] : std::nullopt);
  }
  while (!nl.empty() && !nl.back()) nl.pop_back();
  while (!nr.empty() && !nr.back()) nr.pop_back();
  l = std::move(nl);
  rr = std::move(nr);
}

Rule species_rule(std::string name, const std::vector<Species>& lhs,
                  const std::vector<Species>& rhs, RateLaw rate, std::string origin) {
  std::vector<Species> common;
  std::vector<Species> lrest;
  std::vector<bool> used(rhs.size(), false);
  for (const auto& s : lhs) {
    bool found = false;
    for (std::size_t j = 0; j < rhs.size(); ++j) {
      if (!used[j] && rhs[j] == s) {
        used[j] = true;
        found = true;
        break;
      }
    }
    (found ? common : lrest).push_back(s);
  }
  std::vector<Expression> left;
  std::vector<Expression> right;
  for (const auto& s : common) {
    left.push_back(s.expression());
    right.push_back(s.expression());
  }
  for (const auto& s : lrest) left.push_back(s.expression());
  for (std::size_t j = 0; j < rhs.size(); ++j) {
    if (!used[j]) right.push_back(rhs[j].expression());
  }
  Rule r;
  r.name = std::move(name);
  r.lhs = concat(left);
  r.rhs = concat(right);
  r.rate = std::move(rate);
  r.origin = std::move(origin);
  return r;
}

std::string joint_key(const Rule& r, const Signature& sig) {
  EditScript script = validate_rule(r, sig);
  Expression lhs = normalize(r.lhs);
  Expression rhs = normalize(r.rhs);
  auto max_label = [](const Expression& e) {
    int top = 0;
    for (const auto& a : e.entries) {
      for (const auto& s : a->sites) {
        if (s.binding.is_bound()) top = std::max(top, s.binding.label);
      }
    }
    return top;
  };
  int top = max_label(lhs);
  Expression joint;
  for (const auto& e : lhs.entries) {
    Agent a = *e;
    a.name = "L:" + a.name;
    joint.entries.emplace_back(std::move(a));
  }
  for (const auto& e : rhs.entries) {
    Agent a = *e;
    a.name = "R:" + a.name;
    for (auto& s : a.sites) {
      if (s.binding.is_bound()) s.binding.label += top;
    }
    joint.entries.emplace_back(std::move(a));
  }
  int label = top + max_label(rhs) + 1;
  for (auto [l, rr] : script.preserved) {
    joint.entries[l]->sites.push_back({"@", std::nullopt, Binding::bound(label)});
    joint.entries[lhs.entries.size() + rr]->sites.push_back({"@", std::nullopt, Binding::bound(label)});
    ++label;
  }
  return canonical_key(joint);
}

double reaction_factor(const std::vector<Species>& lhs) {
  double f = 1.0;
  for (const auto& s : lhs) f *= static_cast<double>(s.automorphisms());
  return f;
}

RateExpr binomial(const Expression& p, int c) {
  RateExpr x = RateExpr::count(p);
  if (c == 1) return x;
  RateExpr out = x;
  for (int i = 1; i < c; ++i) out = std::move(out) * (x - RateExpr::number(i));
  return std::move(out) / RateExpr::number(std::tgamma(c + 1.0));
}

RateExpr power_over_factorial(const RateExpr& x, int c) {
  RateExpr out = x;
  for (int i = 1; i < c; ++i) out = std::move(out) * x;
  if (c > 1) out = std::move(out) / RateExpr::number(std::tgamma(c + 1.0));
  return out;
}

std::vector<std::pair<Species, int>> tally(const std::vector<Species>& list) {
  std::vector<std::pair<Species, int>> out;
  for (const auto& s : list) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == s; });
    if (it == out.end()) {
      out.emplace_back(s, 1);
    } else {
      ++it->second;
    }
  }
  return out;
}

bool matches(const Expression& p, const Species& sp) {
  return embeds(link(p), link(sp.expression()));
}

std::vector<Expression> counted_patterns(const Rule& r) {
  std::vector<Expression> out;
  if (r.rate.is_closed()) collect_patterns(r.rate.expr, out);
  return out;
}

std::vector<std::string> rule_names(const KappaSystem& sys) {
  std::vector<std::string> out;
  for (const auto& r : sys.rules) out.push_back(r.name);
  return out;
}

}  // namespace kred::detail
