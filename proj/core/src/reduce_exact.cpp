#include <algorithm>
#include <cmath>
#include <map>

#include "kred/reduce.hpp"
#include "rule_edit.hpp"

namespace kred {

using detail::SideView;

std::string_view pass_name(PassKind k) {
  switch (k) {
    case PassKind::SRC: return "SRC";
    case PassKind::ME: return "ME";
    case PassKind::FastDimer: return "FastDimer";
    case PassKind::Enzymatic: return "Enzymatic";
    case PassKind::GeneralizedEnzymatic: return "GeneralizedEnzymatic";
  }
  return "?";
}

PassResult similar_rule_composition(const KappaSystem& sys) {
  PassResult out{sys, {}, {}};
  std::vector<std::string> keys;
  for (const auto& r : sys.rules) {
    keys.push_back(detail::joint_key(r, sys.signature) + (r.rate.is_closed() ? "#closed" : "#ma"));
  }
  std::vector<bool> absorbed(sys.rules.size(), false);
  out.system.rules.clear();
  for (std::size_t i = 0; i < sys.rules.size(); ++i) {
    if (absorbed[i]) continue;
    std::vector<std::size_t> group{i};
    for (std::size_t j = i + 1; j < sys.rules.size(); ++j) {
      if (!absorbed[j] && keys[j] == keys[i]) {
        group.push_back(j);
        absorbed[j] = true;
      }
    }
    Rule merged = sys.rules[i];
    if (group.size() > 1) {
      // Summation order is fixed by value so that the result does not
      // depend on the order in which the rules were written.
      if (merged.rate.is_closed()) {
        std::vector<RateExpr> terms;
        for (auto g : group) terms.push_back(sys.rules[g].rate.expr);
        std::sort(terms.begin(), terms.end(), [](const RateExpr& a, const RateExpr& b) {
          return to_string(a) < to_string(b);
        });
        RateExpr sum = terms[0];
        for (std::size_t t = 1; t < terms.size(); ++t) sum = std::move(sum) + terms[t];
        merged.rate = RateLaw::closed(std::move(sum));
      } else {
        std::vector<double> ks;
        for (auto g : group) ks.push_back(sys.rules[g].rate.k);
        std::sort(ks.begin(), ks.end());
        double sum = 0.0;
        for (double k : ks) sum += k;
        merged.rate = RateLaw::mass_action(sum);
      }
      merged.origin = "SRC";
      ReductionStep step;
      step.kind = PassKind::SRC;
      std::string names;
      for (auto g : group) {
        if (g != i) step.removed_rules.push_back(sys.rules[g].name);
        names += (names.empty() ? "" : ", ") + sys.rules[g].name;
      }
      step.rewritten_rules.push_back(merged.name);
      step.justification.push_back("rules " + names +
                                   " rewrite the same left side into the same right side "
                                   "with the same agent alignment");
      step.justification.push_back("merged rate law: " + to_string(merged.rate));
      out.steps.push_back(std::move(step));
    }
    out.system.rules.push_back(std::move(merged));
  }
  return out;
}

namespace {

// Removes one copy of `sp` present on both sides and left untouched by the
// rule, keeping the alignment of everything else.
std::optional<Rule> drop_aligned_copy(const Rule& r, const Species& sp, const Signature& sig) {
  EditScript script = validate_rule(r, sig);
  SideView lv = detail::view(r.lhs, sig);
  SideView rv = detail::view(r.rhs, sig);
  auto lpos = detail::agent_entries(r.lhs);
  auto rpos = detail::agent_entries(r.rhs);
  std::vector<int> fwd(lpos.size(), -1);
  for (auto [l, rr] : script.preserved) fwd[l] = rr;
  std::vector<bool> touched_l(lpos.size(), false);
  std::vector<bool> touched_r(rpos.size(), false);
  for (const auto& op : script.ops) {
    if (op.lhs_agent >= 0) touched_l[op.lhs_agent] = true;
    if (op.rhs_agent >= 0) touched_r[op.rhs_agent] = true;
  }
  auto agent_of = [](const std::vector<int>& pos, int entry) {
    return static_cast<int>(std::find(pos.begin(), pos.end(), entry) - pos.begin());
  };
  for (std::size_t c = 0; c < lv.comps.size(); ++c) {
    if (!lv.species[c] || !(*lv.species[c] == sp)) continue;
    std::vector<int> image;
    bool ok = true;
    for (int entry : lv.entries[c]) {
      int a = agent_of(lpos, entry);
      if (fwd[a] < 0 || touched_l[a] || touched_r[fwd[a]]) {
        ok = false;
        break;
      }
      image.push_back(rpos[fwd[a]]);
    }
    if (!ok) continue;
    std::sort(image.begin(), image.end());
    for (std::size_t d = 0; d < rv.comps.size(); ++d) {
      auto entries = rv.entries[d];
      std::sort(entries.begin(), entries.end());
      if (entries != image || !rv.species[d] || !(*rv.species[d] == sp)) continue;
      Rule out = r;
      for (int e : lv.entries[c]) out.lhs.entries[e].reset();
      for (int e : rv.entries[d]) out.rhs.entries[e].reset();
      detail::compact(out);
      return out;
    }
  }
  return std::nullopt;
}

std::optional<Rule> drop_modifier(const Rule& r, const Species& sp, std::size_t m,
                                  const Signature& sig) {
  Rule cur = r;
  bool aligned = true;
  for (std::size_t i = 0; i < m && aligned; ++i) {
    auto next = drop_aligned_copy(cur, sp, sig);
    if (next) {
      cur = std::move(*next);
    } else {
      aligned = false;
    }
  }
  if (aligned) return cur;
  SideView lv = detail::view(r.lhs, sig);
  SideView rv = detail::view(r.rhs, sig);
  if (!lv.species_only() || !rv.species_only()) return std::nullopt;
  auto strip = [&](std::vector<Species> list) {
    for (std::size_t i = 0; i < m; ++i) list.erase(std::find(list.begin(), list.end(), sp));
    return list;
  };
  return detail::species_rule(r.name, strip(lv.species_list()), strip(rv.species_list()), r.rate,
                              r.origin);
}

std::vector<Species> candidate_species(const KappaSystem& sys) {
  std::vector<Species> out;
  auto take = [&](const std::optional<Species>& s) {
    if (s && std::find(out.begin(), out.end(), *s) == out.end()) out.push_back(*s);
  };
  for (const auto& r : sys.rules) {
    for (const auto& s : detail::view(r.lhs, sys.signature).species) take(s);
    for (const auto& s : detail::view(r.rhs, sys.signature).species) take(s);
  }
  for (const auto& e : sys.init) take(e.species);
  return out;
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

// A pattern that is not `sp` itself but can match it would see the
// eliminated copies; such species are left alone.
std::optional<std::string> partial_match(const KappaSystem& sys, const Species& sp) {
  for (const auto& r : sys.rules) {
    for (const auto* side : {&r.lhs, &r.rhs}) {
      SideView v = detail::view(*side, sys.signature);
      for (std::size_t c = 0; c < v.comps.size(); ++c) {
        if (!v.species[c] && detail::matches(v.comps[c], sp)) {
          return "pattern " + to_string(v.comps[c]) + " in rule '" + r.name + "' can match " +
                 to_string(sp.expression());
        }
      }
    }
    for (const auto& p : detail::counted_patterns(r)) {
      if (detail::matches(p, sp) && canonical_key(p) != sp.key()) {
        return "rate law of rule '" + r.name + "' counts " + to_string(p) + " which can match " +
               to_string(sp.expression());
      }
    }
  }
  return std::nullopt;
}

RateExpr fix_count(const RateExpr& e, const Species& sp, long long n0) {
  return substitute(e, [&](const Expression& p) -> std::optional<RateExpr> {
    if (canonical_key(p) == sp.key()) return RateExpr::number(static_cast<double>(n0));
    return std::nullopt;
  });
}

double choose(long long n, std::size_t m) {
  if (n < static_cast<long long>(m)) return 0.0;
  double out = 1.0;
  for (std::size_t i = 0; i < m; ++i) out = out * static_cast<double>(n - static_cast<long long>(i)) / static_cast<double>(i + 1);
  return out;
}

std::optional<ReductionStep> eliminate_one(KappaSystem& sys, std::vector<std::string>& notes) {
  for (const auto& sp : candidate_species(sys)) {
    std::size_t modifier_in = 0;
    bool ok = true;
    for (const auto& r : sys.rules) {
      Role role = classify_species(r, sp);
      if (role == Role::Modifier) {
        ++modifier_in;
      } else if (role != Role::Absent) {
        ok = false;
        break;
      }
    }
    if (!ok || modifier_in == 0) continue;
    std::string name = to_string(sp.expression());
    if (observed(sys, sp)) continue;
    if (auto why = partial_match(sys, sp)) {
      notes.push_back("ME: " + name + " kept: " + *why);
      continue;
    }
    long long n0 = sys.initial_count(sp);
    ReductionStep step;
    step.kind = PassKind::ME;
    step.removed_species.push_back(to_string(sp.expression()));
    step.justification.push_back(name + " is a modifier or absent in every rule and a modifier in " +
                                 std::to_string(modifier_in) + " rule(s)");
    step.justification.push_back(name + " is not observed");
    step.justification.push_back("initial copy number " + std::to_string(n0) +
                                 " is constant along every trajectory");
    std::vector<Rule> rules;
    bool failed = false;
    for (const auto& r : sys.rules) {
      std::size_t m = occurrence_count(sp, r.lhs);
      Rule next = r;
      bool changed = false;
      if (m > 0) {
        auto dropped = drop_modifier(r, sp, m, sys.signature);
        if (!dropped) {
          notes.push_back("ME: " + name + " kept: cannot detach it from rule '" + r.name + "'");
          failed = true;
          break;
        }
        next = std::move(*dropped);
        changed = true;
        if (next.rate.is_closed()) {
          if (n0 < static_cast<long long>(m)) next.rate = RateLaw::mass_action(0.0);
        } else {
          next.rate.k *= std::pow(static_cast<double>(sp.automorphisms()), static_cast<double>(m)) *
                         choose(n0, m);
        }
      }
      if (next.rate.is_closed()) {
        RateExpr fixed = fix_count(next.rate.expr, sp, n0);
        if (!(fixed == next.rate.expr)) {
          next.rate.expr = std::move(fixed);
          changed = true;
        }
      }
      if (!changed) {
        rules.push_back(std::move(next));
        continue;
      }
      next.origin = "ME";
      if (!next.rate.is_closed() && next.rate.k == 0.0) {
        step.removed_rules.push_back(r.name);
        step.justification.push_back("rule '" + r.name + "' can no longer fire");
        continue;
      }
      if (next.lhs.empty() && next.rhs.empty()) {
        step.removed_rules.push_back(r.name);
        continue;
      }
      if (validate_rule(next, sys.signature).ops.empty()) {
        step.removed_rules.push_back(r.name);
        step.justification.push_back("rule '" + r.name + "' has no effect once " + name +
                                     " is removed");
        continue;
      }
      step.rewritten_rules.push_back(r.name);
      rules.push_back(std::move(next));
    }
    if (failed) continue;
    sys.rules = std::move(rules);
    std::erase_if(sys.init, [&](const InitEntry& e) { return e.species == sp; });
    return step;
  }
  return std::nullopt;
}

}  // namespace

PassResult modifier_elimination(const KappaSystem& sys) {
  PassResult out{sys, {}, {}};
  while (auto step = eliminate_one(out.system, out.notes)) out.steps.push_back(std::move(*step));
  return out;
}

}  // namespace kred
