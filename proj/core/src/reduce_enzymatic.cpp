#include <algorithm>
#include <set>

#include "kred/reduce.hpp"
#include "rule_edit.hpp"

namespace kred {

using detail::SideView;

namespace {

bool ops_only(const EditScript& s, EditOp::Kind kind) {
  if (!s.created.empty() || !s.deleted.empty() || s.ops.empty()) return false;
  return std::all_of(s.ops.begin(), s.ops.end(), [&](const EditOp& op) { return op.kind == kind; });
}

bool same_multiset(std::vector<Species> a, std::vector<Species> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

std::vector<Species> minus_one(std::vector<Species> list, const Species& s) {
  list.erase(std::find(list.begin(), list.end(), s));
  return list;
}

bool contains(const std::vector<Species>& list, const Species& s) {
  return std::find(list.begin(), list.end(), s) != list.end();
}

struct Shape {
  bool ok = false;
  SideView lhs;
  SideView rhs;
};

Shape shape(const Rule& r, const Signature& sig) {
  Shape s{false, detail::view(r.lhs, sig), detail::view(r.rhs, sig)};
  s.ok = !r.rate.is_closed() && s.lhs.species_only() && s.rhs.species_only();
  return s;
}

bool observed(const KappaSystem& sys, const Species& sp) {
  for (const auto& o : sys.observables) {
    std::vector<Expression> ps;
    if (o.closed) {
      collect_patterns(o.expr, ps);
    } else {
      ps.push_back(o.pattern);
    }
    for (const auto& p : ps) {
      if (detail::matches(p, sp)) return true;
    }
  }
  return false;
}

// Whether `r` mentions `sp` in any way: as a component, through a pattern
// that can match it, or in its rate law.
bool mentions(const Rule& r, const Species& sp, const Signature& sig) {
  for (const auto* side : {&r.lhs, &r.rhs}) {
    SideView v = detail::view(*side, sig);
    for (std::size_t c = 0; c < v.comps.size(); ++c) {
      if (v.species[c] ? *v.species[c] == sp : detail::matches(v.comps[c], sp)) return true;
    }
  }
  for (const auto& p : detail::counted_patterns(r)) {
    if (detail::matches(p, sp)) return true;
  }
  return false;
}

std::optional<std::string> build_branch(const KappaSystem& sys, const Rule& b, const Species& e,
                                        EnzymeBranch& out) {
  const auto& sig = sys.signature;
  Shape bs = shape(b, sig);
  const Species& c = out.complex;
  out.substrates = minus_one(bs.lhs.species_list(), e);
  if (c == e || contains(out.substrates, c)) return "complex of '" + b.name + "' is not new";
  auto with_enzyme = out.substrates;
  with_enzyme.push_back(e);
  const Rule* u = nullptr;
  std::vector<const Rule*> cats;
  for (const auto& r : sys.rules) {
    if (&r == &b) continue;
    Shape rs = shape(r, sig);
    if (!rs.ok || rs.lhs.comps.size() != 1 || !(*rs.lhs.species[0] == c)) continue;
    if (!u && same_multiset(rs.rhs.species_list(), with_enzyme) &&
        ops_only(validate_rule(r, sig), EditOp::Kind::Unbinding)) {
      u = &r;
    } else {
      cats.push_back(&r);
    }
  }
  if (cats.size() != 1) {
    return "complex " + to_string(c.expression()) + " has " + std::to_string(cats.size()) +
           " catalytic rules instead of one";
  }
  const Rule& cat = *cats[0];
  auto rhs = shape(cat, sig).rhs.species_list();
  if (contains(rhs, c)) {
    out.complex_retained = true;
    out.products = minus_one(rhs, c);
    if (!u) return "complex " + to_string(c.expression()) + " is kept by catalysis but never dissociates";
  } else if (contains(rhs, e)) {
    out.products = minus_one(rhs, e);
  } else {
    return "catalytic rule '" + cat.name + "' does not release the enzyme";
  }
  if (out.products.empty()) return "catalytic rule '" + cat.name + "' makes no product";
  out.catalytic = cat.name;
  if (u) out.unbinding = u->name;
  out.k_bind = b.rate.k * detail::reaction_factor(bs.lhs.species_list());
  out.k_unbind = u ? u->rate.k * detail::reaction_factor({c}) : 0.0;
  out.k_cat = cat.rate.k * detail::reaction_factor({c});
  double denom = out.k_unbind + (out.complex_retained ? 0.0 : out.k_cat);
  out.K = out.k_bind / denom;
  return std::nullopt;
}

bool is_binding_rule(const Rule& r, const Signature& sig) {
  Shape s = shape(r, sig);
  return s.ok && s.lhs.comps.size() >= 2 && s.rhs.comps.size() == 1 &&
         ops_only(validate_rule(r, sig), EditOp::Kind::Binding);
}

std::optional<std::string> build_group(const KappaSystem& sys, const Species& e,
                                       const ReductionConfig& cfg, EnzymaticGroup& g) {
  const auto& sig = sys.signature;
  std::string ename = to_string(e.expression());
  g.enzyme_total = sys.initial_count(e);
  for (const auto& r : sys.rules) {
    if (!is_binding_rule(r, sig)) continue;
    if (shape(r, sig).lhs.count(e) != 1) continue;
    EnzymeBranch br{.complex = *shape(r, sig).rhs.species[0], .binding = r.name};
    if (auto why = build_branch(sys, r, e, br)) return *why;
    g.branches.push_back(std::move(br));
  }
  if (g.branches.empty()) return "no binding rule";
  if (observed(sys, e)) return "enzyme " + ename + " is observed";
  if (g.enzyme_total >= cfg.enzyme_copy_threshold) {
    return "enzyme " + ename + " starts with " + std::to_string(g.enzyme_total) +
           " copies, not below the threshold " + std::to_string(cfg.enzyme_copy_threshold);
  }
  std::set<std::string> group_rules;
  for (const auto& br : g.branches) {
    group_rules.insert(br.binding);
    group_rules.insert(br.catalytic);
    if (br.unbinding) group_rules.insert(*br.unbinding);
  }
  for (const auto& r : sys.rules) {
    if (!group_rules.count(r.name) && mentions(r, e, sig)) {
      return "enzyme " + ename + " also appears in rule '" + r.name + "'";
    }
  }
  std::set<std::string> seen;
  for (const auto& br : g.branches) {
    std::string cname = to_string(br.complex.expression());
    if (!seen.insert(br.complex.key()).second) return "complex " + cname + " is shared by two branches";
    if (observed(sys, br.complex)) return "complex " + cname + " is observed";
    if (sys.initial_count(br.complex) != 0) return "complex " + cname + " is initially present";
    for (const auto& r : sys.rules) {
      bool own = r.name == br.binding || r.name == br.catalytic ||
                 (br.unbinding && r.name == *br.unbinding);
      if (!own && mentions(r, br.complex, sig)) {
        return "complex " + cname + " also appears in rule '" + r.name + "'";
      }
    }
    if (contains(br.products, e) || contains(br.substrates, br.complex)) {
      return "branch '" + br.binding + "' recycles the enzyme or complex";
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<EnzymaticGroup> detect_enzymatic(const KappaSystem& sys, const ReductionConfig& cfg,
                                             std::vector<std::string>* notes) {
  std::vector<EnzymaticGroup> out;
  std::vector<Species> tried;
  for (const auto& r : sys.rules) {
    if (!is_binding_rule(r, sys.signature)) continue;
    auto lhs = detail::view(r.lhs, sys.signature).species_list();
    for (const auto& e : lhs) {
      if (contains(tried, e)) continue;
      tried.push_back(e);
      if (std::count(lhs.begin(), lhs.end(), e) != 1) continue;
      EnzymaticGroup g{e, 0, {}};
      if (auto why = build_group(sys, e, cfg, g)) {
        if (notes) notes->push_back("Enzymatic: " + to_string(e.expression()) + " rejected: " + *why);
        continue;
      }
      out.push_back(std::move(g));
    }
  }
  return out;
}

namespace {

RateExpr substrate_product(const std::vector<Species>& substrates) {
  std::optional<RateExpr> out;
  for (const auto& [s, n] : detail::tally(substrates)) {
    RateExpr term = detail::binomial(s.expression(), n);
    out = out ? std::move(*out) * std::move(term) : std::move(term);
  }
  return *out;
}

bool much_greater(double a, double b) { return a >= 10.0 * b; }

}  // namespace

PassResult generalized_enzymatic_reduce(const KappaSystem& sys, const ReductionConfig& cfg) {
  PassResult out{sys, {}, {}};
  for (int pass = 0; pass < cfg.max_passes; ++pass) {
    KappaSystem& cur = out.system;
    auto groups = detect_enzymatic(cur, cfg, &out.notes);
    if (groups.empty()) break;
    const EnzymaticGroup g = groups.front();
    std::size_t n = g.branches.size();

    std::set<std::string> removed;
    for (const auto& br : g.branches) {
      removed.insert(br.binding);
      removed.insert(br.catalytic);
      if (br.unbinding) removed.insert(*br.unbinding);
    }
    long long et = g.enzyme_total;
    for (const auto& br : g.branches) et += cur.initial_count(br.complex);

    ReductionStep step;
    step.kind = n == 1 ? PassKind::Enzymatic : PassKind::GeneralizedEnzymatic;
    std::string ename = to_string(g.enzyme.expression());
    auto taken_const = [&](const std::string& s) { return cur.has_constant(s); };
    std::string et_name = detail::fresh_name("E_T", taken_const);
    cur.constants.push_back({et_name, static_cast<double>(et)});
    step.introduced_constants.push_back({et_name, static_cast<double>(et)});

    std::vector<std::string> knames;
    std::optional<RateExpr> z;
    for (const auto& br : g.branches) {
      std::string kn = detail::fresh_name("K_" + br.catalytic, taken_const);
      cur.constants.push_back({kn, br.K});
      step.introduced_constants.push_back({kn, br.K});
      knames.push_back(kn);
      RateExpr term = RateExpr::constant(kn) * substrate_product(br.substrates);
      z = z ? std::move(*z) + std::move(term) : std::move(term);
    }
    RateExpr denom = RateExpr::number(1) + *z;

    std::vector<Rule> added;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& br = g.branches[i];
      RateExpr law = RateExpr::constant(et_name) * RateExpr::constant(knames[i]) *
                     substrate_product(br.substrates) / denom;
      if (br.k_cat != 1.0) law = RateExpr::number(br.k_cat) * std::move(law);
      std::vector<Species> rhs = br.products;
      if (br.complex_retained) rhs.insert(rhs.begin(), br.substrates.begin(), br.substrates.end());
      std::string name = detail::fresh_name(br.catalytic + "_mm", [&](const std::string& s) {
        return !removed.count(s) && cur.find_rule(s) != nullptr;
      });
      added.push_back(detail::species_rule(name, br.substrates, rhs, RateLaw::closed(std::move(law)),
                                           std::string(pass_name(step.kind))));
      step.added_rules.push_back(name);

      std::string cname = to_string(br.complex.expression());
      step.justification.push_back(
          "branch " + std::to_string(i + 1) + ": '" + br.binding + "' forms " + cname +
          (br.unbinding ? ", '" + *br.unbinding + "' dissociates it" : std::string()) + ", '" +
          br.catalytic + "' " + (br.complex_retained ? "produces from it" : "releases the enzyme and product"));
      step.justification.push_back(cname + " is not observed, starts at 0 and is used by no other rule");
      if (br.complex_retained) {
        step.justification.push_back(knames[i] + " = k_bind / k_unbind = " + format_number(br.k_bind) +
                                     " / " + format_number(br.k_unbind));
      } else {
        step.justification.push_back(knames[i] + " = k_bind / (k_unbind + k_cat) = " +
                                     format_number(br.k_bind) + " / (" + format_number(br.k_unbind) +
                                     " + " + format_number(br.k_cat) + ")");
      }
      step.advisories.push_back(
          "branch " + std::to_string(i + 1) + ": k_bind >> k_unbind + k_cat " +
          (much_greater(br.k_bind, br.k_unbind + br.k_cat) ? "holds" : "does not hold") +
          "; k_unbind >> k_cat " + (much_greater(br.k_unbind, br.k_cat) ? "holds" : "does not hold"));
      step.removed_species.push_back(cname);
    }
    step.removed_species.insert(step.removed_species.begin(), ename);
    step.justification.insert(step.justification.begin(),
                              {"enzyme " + ename + " is not observed",
                               "enzyme " + ename + " starts with " + std::to_string(g.enzyme_total) +
                                   " copies, below the threshold " +
                                   std::to_string(cfg.enzyme_copy_threshold),
                               "enzyme " + ename + " is neither produced nor degraded outside the group",
                               et_name + " = " + std::to_string(et) + " (free enzyme plus complexes)"});

    std::vector<Rule> rules;
    bool placed = false;
    for (const auto& r : cur.rules) {
      if (removed.count(r.name)) {
        step.removed_rules.push_back(r.name);
        if (!placed) {
          rules.insert(rules.end(), added.begin(), added.end());
          placed = true;
        }
        continue;
      }
      rules.push_back(r);
    }
    cur.rules = std::move(rules);
    std::erase_if(cur.init, [&](const InitEntry& e) {
      if (e.species == g.enzyme) return true;
      return std::any_of(g.branches.begin(), g.branches.end(),
                         [&](const EnzymeBranch& br) { return br.complex == e.species; });
    });
    out.steps.push_back(std::move(step));
  }
  return out;
}

}  // namespace kred
