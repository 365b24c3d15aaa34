#include "kred/rule.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace kred {

std::string to_string(const RateLaw& law) {
  if (law.is_closed()) return "@@ " + to_string(law.expr);
  return "@ " + format_number(law.k);
}

std::string_view kind_name(EditOp::Kind k) {
  switch (k) {
    case EditOp::Kind::Creation: return "creation";
    case EditOp::Kind::Deletion: return "deletion";
    case EditOp::Kind::Modification: return "modification";
    case EditOp::Kind::Binding: return "binding";
    case EditOp::Kind::Unbinding: return "unbinding";
  }
  return "?";
}

std::string_view role_name(Role r) {
  switch (r) {
    case Role::Reactant: return "reactant";
    case Role::Modifier: return "modifier";
    case Role::Product: return "product";
    case Role::Absent: return "absent";
    case Role::NetConsumer: return "net-consumer";
    case Role::NetProducer: return "net-producer";
  }
  return "?";
}

namespace {

int site_index(const Agent& a, std::string_view name) {
  for (std::size_t i = 0; i < a.sites.size(); ++i) {
    if (a.sites[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

std::set<std::string> site_names(const Agent& a) {
  std::set<std::string> out;
  for (const auto& s : a.sites) out.insert(s.name);
  return out;
}

class ScriptBuilder {
 public:
  ScriptBuilder(const Rule& r, const Signature& sig)
      : rule_(r), sig_(sig), lhs_(link(r.lhs)), rhs_(link(r.rhs)) {}

  EditScript build() {
    align();
    fwd_.assign(lhs_.size(), -1);
    back_.assign(rhs_.size(), -1);
    for (auto [l, r] : script_.preserved) {
      fwd_[l] = r;
      back_[r] = l;
    }
    for (int l : script_.deleted) check_deleted(l);
    for (auto [l, r] : script_.preserved) check_preserved(l, r);
    for (int r : script_.created) check_created(r);
    std::stable_sort(script_.ops.begin(), script_.ops.end(),
                     [](const EditOp& a, const EditOp& b) { return step(a.kind) < step(b.kind); });
    return std::move(script_);
  }

 private:
  static int step(EditOp::Kind k) {
    switch (k) {
      case EditOp::Kind::Creation: return 0;
      case EditOp::Kind::Unbinding: return 1;
      case EditOp::Kind::Deletion: return 2;
      case EditOp::Kind::Modification: return 3;
      case EditOp::Kind::Binding: return 4;
    }
    return 5;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::Rule, "rule '" + rule_.name + "': " + msg, rule_.loc);
  }

  void align() {
    const auto& le = rule_.lhs.entries;
    const auto& re = rule_.rhs.entries;
    int li = 0;
    int ri = 0;
    bool diverged = false;
    for (std::size_t i = 0; i < std::max(le.size(), re.size()); ++i) {
      bool has_l = i < le.size() && le[i].has_value();
      bool has_r = i < re.size() && re[i].has_value();
      if (has_l && has_r && !diverged && le[i]->name == re[i]->name) {
        script_.preserved.emplace_back(li++, ri++);
        continue;
      }
      if (has_l && has_r) diverged = true;
      if (has_l) script_.deleted.push_back(li++);
      if (has_r) script_.created.push_back(ri++);
    }
  }

  void add(EditOp::Kind kind, int l, int r, std::string site, std::string detail = {}) {
    script_.ops.push_back({kind, l, r, std::move(site), std::move(detail)});
  }

  // Each bond is reported once, from its smaller endpoint.
  bool first_endpoint(SiteRef a, SiteRef b) { return std::tie(a.agent, a.site) < std::tie(b.agent, b.site); }

  void check_deleted(int l) {
    const Agent& a = lhs_.agents[l];
    if (!is_fully_specified(a, sig_)) {
      fail("deletion of non-free agent " + to_string(a) +
           ": a deleted agent must document its whole interface without wildcards");
    }
    add(EditOp::Kind::Deletion, l, -1, {}, a.name);
  }

  void check_created(int r) {
    const Agent& a = rhs_.agents[r];
    if (!is_fully_specified(a, sig_)) {
      fail("created agent " + to_string(a) + " must document its whole interface");
    }
    add(EditOp::Kind::Creation, -1, r, {}, a.name);
    for (std::size_t s = 0; s < a.sites.size(); ++s) {
      const auto& p = rhs_.partner[r][s];
      if (!p) continue;
      SiteRef here{r, static_cast<int>(s)};
      // Bonds to preserved agents are reported from the preserved side.
      if (back_[p->agent] != -1) continue;
      if (first_endpoint(here, *p)) add(EditOp::Kind::Binding, -1, r, a.sites[s].name);
    }
  }

  void check_preserved(int l, int r) {
    const Agent& la = lhs_.agents[l];
    const Agent& ra = rhs_.agents[r];
    if (site_names(la) != site_names(ra)) {
      fail("agent " + la.name + " at position " + std::to_string(l + 1) +
           " mentions different sites on the two sides");
    }
    for (std::size_t rs = 0; rs < ra.sites.size(); ++rs) {
      const Site& rsite = ra.sites[rs];
      int ls = site_index(la, rsite.name);
      const Site& lsite = la.sites[ls];
      std::string where = la.name + "." + rsite.name;
      if (lsite.internal.has_value() != rsite.internal.has_value()) {
        fail("internal state of " + where + " must be tested on the left to be set on the right");
      }
      if (lsite.internal && *lsite.internal != *rsite.internal) {
        add(EditOp::Kind::Modification, l, r, rsite.name, *lsite.internal + "->" + *rsite.internal);
      }
      const auto& lb = lsite.binding;
      const auto& rb = rsite.binding;
      const auto& lp = lhs_.partner[l][ls];
      const auto& rp = rhs_.partner[r][rs];
      if (rb.is_wildcard()) {
        if (!lb.is_wildcard()) fail(where + " cannot become '!_' on the right");
        continue;
      }
      if (lb.is_wildcard()) {
        if (rb.is_bound()) fail(where + " has an unknown partner and cannot be rebound");
        add(EditOp::Kind::Unbinding, l, r, rsite.name, "any partner");
        continue;
      }
      bool same_bond = false;
      if (lb.is_bound() && rb.is_bound()) {
        int mapped = fwd_[lp->agent];
        same_bond = mapped == rp->agent &&
                    lhs_.agents[lp->agent].sites[lp->site].name ==
                        rhs_.agents[rp->agent].sites[rp->site].name;
      }
      if (same_bond) continue;
      if (lb.is_bound()) {
        SiteRef here{l, ls};
        bool partner_kept = fwd_[lp->agent] != -1;
        if (!partner_kept || first_endpoint(here, *lp)) {
          add(EditOp::Kind::Unbinding, l, r, rsite.name);
        }
      }
      if (rb.is_bound()) {
        SiteRef here{r, static_cast<int>(rs)};
        bool partner_kept = back_[rp->agent] != -1;
        if (!partner_kept || first_endpoint(here, *rp)) {
          add(EditOp::Kind::Binding, l, r, rsite.name);
        }
      }
    }
  }

  const Rule& rule_;
  const Signature& sig_;
  LinkedGraph lhs_;
  LinkedGraph rhs_;
  std::vector<int> fwd_;
  std::vector<int> back_;
  EditScript script_;
};

}  // namespace

EditScript validate_rule(const Rule& r, const Signature& sig) {
  for (const auto* side : {&r.lhs, &r.rhs}) {
    try {
      check_pattern(*side, sig);
    } catch (const Error& e) {
      throw Error(e.code(), "rule '" + r.name + "': " + e.message(), r.loc);
    }
  }
  if (r.lhs.empty() && r.rhs.empty()) {
    throw Error(ErrorCode::Rule, "rule '" + r.name + "' has no agents", r.loc);
  }
  if (r.rate.kind == RateLaw::Kind::MassAction && !(r.rate.k >= 0.0)) {
    throw Error(ErrorCode::Rule, "rule '" + r.name + "' has a negative rate", r.loc);
  }
  return ScriptBuilder(r, sig).build();
}

std::string to_string(const Rule& r) {
  auto side = [](const Expression& e) { return e.entries.empty() ? std::string(".") : to_string(e); };
  return side(r.lhs) + " -> " + side(r.rhs) + " " + to_string(r.rate);
}

std::string to_string(const EditOp& op, const Rule& r) {
  auto lhs = r.lhs.agents();
  auto rhs = r.rhs.agents();
  std::string out(kind_name(op.kind));
  auto agent_name = [&](const EditOp& o) {
    if (o.lhs_agent >= 0) return lhs[o.lhs_agent].name + "#" + std::to_string(o.lhs_agent + 1);
    return rhs[o.rhs_agent].name + "#" + std::to_string(o.rhs_agent + 1) + "'";
  };
  out += " " + agent_name(op);
  if (!op.site.empty()) out += "." + op.site;
  if (!op.detail.empty() && op.kind != EditOp::Kind::Creation && op.kind != EditOp::Kind::Deletion) {
    out += " (" + op.detail + ")";
  }
  return out;
}

Role classify_species(const Rule& r, const Species& sp) {
  std::size_t l = occurrence_count(sp, r.lhs);
  std::size_t p = occurrence_count(sp, r.rhs);
  if (l == 0 && p == 0) return Role::Absent;
  if (l == p) return Role::Modifier;
  if (p == 0) return Role::Reactant;
  if (l == 0) return Role::Product;
  return l > p ? Role::NetConsumer : Role::NetProducer;
}

namespace {

void unbind(LinkedGraph& g, int a, int s) {
  auto& p = g.partner[a][s];
  if (p) {
    g.partner[p->agent][p->site].reset();
    g.agents[p->agent].sites[p->site].binding = Binding::free();
  }
  p.reset();
  g.agents[a].sites[s].binding = Binding::free();
}

}  // namespace

void apply_rule(const Rule& r, const EditScript& script, const std::vector<int>& embedding,
                LinkedGraph& g) {
  LinkedGraph rhs = link(r.rhs);
  std::vector<int> target(rhs.size(), -1);
  for (auto [l, rr] : script.preserved) target[rr] = embedding[l];
  for (int c : script.created) {
    Agent a = rhs.agents[c];
    for (auto& s : a.sites) s.binding = Binding::free();
    target[c] = static_cast<int>(g.agents.size());
    g.partner.emplace_back(a.sites.size());
    g.agents.push_back(std::move(a));
  }
  auto site_of = [&](int ra, int rs) {
    int t = target[ra];
    return SiteRef{t, site_index(g.agents[t], rhs.agents[ra].sites[rs].name)};
  };
  for (int l : script.deleted) {
    int t = embedding[l];
    for (std::size_t s = 0; s < g.agents[t].sites.size(); ++s) unbind(g, t, static_cast<int>(s));
  }
  for (std::size_t ra = 0; ra < rhs.size(); ++ra) {
    for (std::size_t rs = 0; rs < rhs.agents[ra].sites.size(); ++rs) {
      const Site& want = rhs.agents[ra].sites[rs];
      SiteRef here = site_of(static_cast<int>(ra), static_cast<int>(rs));
      if (want.internal) g.agents[here.agent].sites[here.site].internal = want.internal;
      if (want.binding.is_free()) {
        unbind(g, here.agent, here.site);
      } else if (want.binding.is_bound()) {
        const auto& p = rhs.partner[ra][rs];
        SiteRef there = site_of(p->agent, p->site);
        if (g.partner[here.agent][here.site] != there) unbind(g, here.agent, here.site);
      }
    }
  }
  for (std::size_t ra = 0; ra < rhs.size(); ++ra) {
    for (std::size_t rs = 0; rs < rhs.agents[ra].sites.size(); ++rs) {
      const auto& p = rhs.partner[ra][rs];
      if (!p) continue;
      SiteRef here = site_of(static_cast<int>(ra), static_cast<int>(rs));
      SiteRef there = site_of(p->agent, p->site);
      g.partner[here.agent][here.site] = there;
      g.agents[here.agent].sites[here.site].binding = Binding::bound(0);
    }
  }
  if (script.deleted.empty()) return;
  std::vector<bool> drop(g.size(), false);
  for (int l : script.deleted) drop[embedding[l]] = true;
  std::vector<int> remap(g.size(), -1);
  LinkedGraph out;
  for (std::size_t a = 0; a < g.size(); ++a) {
    if (drop[a]) continue;
    remap[a] = static_cast<int>(out.agents.size());
    out.agents.push_back(std::move(g.agents[a]));
    out.partner.push_back(std::move(g.partner[a]));
  }
  for (auto& row : out.partner) {
    for (auto& p : row) {
      if (p) p->agent = remap[p->agent];
    }
  }
  g = std::move(out);
}

}  // namespace kred
