#include <algorithm>
#include <cmath>

#include "kred/errors.hpp"
#include "kred/network.hpp"
#include "kred/reduce.hpp"
#include "rule_edit.hpp"

namespace kred {

using detail::SideView;

std::pair<double, double> dimer_partition(double m_total, double K) {
  if (m_total <= 0.0) return {0.0, 0.0};
  // Root of 2K x^2 + x - M_T = 0 written without cancellation.
  double x = 2.0 * m_total / (1.0 + std::sqrt(1.0 + 8.0 * K * m_total));
  return {x, (m_total - x) / 2.0};
}

namespace {

bool only_op(const EditScript& s, EditOp::Kind kind) {
  return s.ops.size() == 1 && s.ops[0].kind == kind && s.created.empty() && s.deleted.empty();
}

std::optional<std::string> dimer_conflict(const KappaSystem& sys, const Rule& r,
                                          const Species& m, const Species& d) {
  Role rm = classify_species(r, m);
  Role rd = classify_species(r, d);
  std::string where = " in rule '" + r.name + "'";
  if (rd != Role::Modifier && rd != Role::Absent) {
    return "dimer is " + std::string(role_name(rd)) + where;
  }
  if (rm == Role::Modifier || rm == Role::NetConsumer || rm == Role::NetProducer) {
    return "monomer is " + std::string(role_name(rm)) + where;
  }
  SideView lv = detail::view(r.lhs, sys.signature);
  SideView rv = detail::view(r.rhs, sys.signature);
  for (const auto* v : {&lv, &rv}) {
    for (std::size_t c = 0; c < v->comps.size(); ++c) {
      if (!v->species[c] && (detail::matches(v->comps[c], m) || detail::matches(v->comps[c], d))) {
        return "pattern " + to_string(v->comps[c]) + where + " can match the monomer or dimer";
      }
    }
  }
  for (const auto& p : detail::counted_patterns(r)) {
    auto key = canonical_key(p);
    if ((detail::matches(p, m) || detail::matches(p, d)) && key != m.key() && key != d.key()) {
      return "rate law" + where + " counts " + to_string(p);
    }
  }
  bool in_lhs = lv.count(m) + lv.count(d) > 0;
  if (in_lhs && !lv.species_only()) return "left side" + where + " is not made of species";
  if (!in_lhs && rv.count(m) > 0) {
    EditScript s = validate_rule(r, sys.signature);
    auto rpos = detail::agent_entries(r.rhs);
    for (std::size_t c = 0; c < rv.comps.size(); ++c) {
      if (!rv.species[c] || !(*rv.species[c] == m)) continue;
      for (int e : rv.entries[c]) {
        int a = static_cast<int>(std::find(rpos.begin(), rpos.end(), e) - rpos.begin());
        if (std::find(s.created.begin(), s.created.end(), a) == s.created.end()) {
          return "monomer" + where + " is built from agents of the left side";
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<DimerCandidate> detect_dimerization(const KappaSystem& sys,
                                                std::vector<std::string>* notes) {
  std::vector<DimerCandidate> out;
  const auto& sig = sys.signature;
  for (const auto& f : sys.rules) {
    if (f.rate.is_closed()) continue;
    SideView lv = detail::view(f.lhs, sig);
    SideView rv = detail::view(f.rhs, sig);
    if (lv.comps.size() != 2 || rv.comps.size() != 1 || !lv.species_only() || !rv.species_only()) {
      continue;
    }
    const Species& m = *lv.species[0];
    if (!(*lv.species[1] == m)) continue;
    const Species& d = *rv.species[0];
    if (!only_op(validate_rule(f, sig), EditOp::Kind::Binding)) continue;
    Rule reverse{f.name, f.rhs, f.lhs, f.rate, f.origin, f.loc};
    std::string want = detail::joint_key(reverse, sig);
    const Rule* b = nullptr;
    for (const auto& r : sys.rules) {
      if (&r != &f && !r.rate.is_closed() && detail::joint_key(r, sig) == want) {
        b = &r;
        break;
      }
    }
    if (!b) continue;
    std::optional<std::string> conflict;
    for (const auto& r : sys.rules) {
      if (&r == &f || &r == b) continue;
      if ((conflict = dimer_conflict(sys, r, m, d))) break;
    }
    if (conflict) {
      if (notes) notes->push_back("FastDimer: pair '" + f.name + "'/'" + b->name + "' rejected: " + *conflict);
      continue;
    }
    DimerCandidate c{m, d, f.name, b->name, f.rate.k, b->rate.k, 0.0};
    double k_eff = f.rate.k * detail::reaction_factor({m, m});
    double k_minus_eff = b->rate.k * detail::reaction_factor({d});
    c.K = k_eff / (2.0 * k_minus_eff);
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

bool involved(const EnzymaticGroup& g, const Species& s) {
  if (g.enzyme == s) return true;
  for (const auto& b : g.branches) {
    if (b.complex == s) return true;
    if (std::find(b.substrates.begin(), b.substrates.end(), s) != b.substrates.end()) return true;
    if (std::find(b.products.begin(), b.products.end(), s) != b.products.end()) return true;
  }
  return false;
}

}  // namespace

PassResult fast_dimerization_reduce(const KappaSystem& sys, const ReductionConfig& cfg) {
  PassResult out{sys, {}, {}};
  for (int pass = 0; pass < cfg.max_passes; ++pass) {
    KappaSystem& cur = out.system;
    auto candidates = detect_dimerization(cur, &out.notes);
    auto groups = detect_enzymatic(cur, cfg);
    const DimerCandidate* pick = nullptr;
    for (const auto& c : candidates) {
      bool clash = std::any_of(groups.begin(), groups.end(), [&](const EnzymaticGroup& g) {
        return involved(g, c.monomer) || involved(g, c.dimer);
      });
      if (clash) {
        out.notes.push_back("FastDimer: pair '" + c.forward + "'/'" + c.backward +
                            "' skipped: its species take part in an enzymatic pattern");
        continue;
      }
      pick = &c;
      break;
    }
    if (!pick) break;
    const DimerCandidate c = *pick;
    const auto& sig = cur.signature;

    std::string base = c.monomer.expression().entries.front()->name + "_T";
    std::string pool = detail::fresh_name(base, [&](const std::string& n) { return sig.contains(n); });
    cur.signature.add(pool, AgentSignature{});
    Expression pool_expr;
    pool_expr.entries.emplace_back(Agent{pool, {}});
    Species mt(pool_expr, cur.signature);
    std::string kname = detail::fresh_name("K_" + c.forward,
                                           [&](const std::string& n) { return cur.has_constant(n); });
    RateExpr K = RateExpr::constant(kname);
    RateExpr total = RateExpr::count(pool_expr);
    RateExpr xm = (sqrt(RateExpr::number(8) * K * total + RateExpr::number(1)) - RateExpr::number(1)) /
                  (RateExpr::number(4) * K);
    RateExpr xm2 = (total - xm) / RateExpr::number(2);
    auto replace = [&](const Expression& p) -> std::optional<RateExpr> {
      auto key = canonical_key(p);
      if (key == c.monomer.key()) return xm;
      if (key == c.dimer.key()) return xm2;
      return std::nullopt;
    };

    ReductionStep step;
    step.kind = PassKind::FastDimer;
    step.removed_rules = {c.forward, c.backward};
    step.removed_species = {to_string(c.monomer.expression()), to_string(c.dimer.expression())};
    std::string mname = to_string(c.monomer.expression());
    std::string dname = to_string(c.dimer.expression());
    step.justification.push_back("'" + c.forward + "' binds two " + mname + " into " + dname +
                                 " and '" + c.backward + "' is its exact reverse");
    step.justification.push_back("the dimer is produced by no other rule and only used as a modifier");
    step.justification.push_back("the monomer is a modifier in no other rule");
    step.justification.push_back("monomer and dimer are tracked through " + pool + "() = M + 2 M2");

    bool used_k = false;
    std::vector<Rule> rules;
    for (const auto& r : cur.rules) {
      if (r.name == c.forward || r.name == c.backward) continue;
      SideView lv = detail::view(r.lhs, sig);
      SideView rv = detail::view(r.rhs, sig);
      std::size_t lm = lv.count(c.monomer) + lv.count(c.dimer);
      std::size_t rm = rv.count(c.monomer) + rv.count(c.dimer);
      bool counts = false;
      for (const auto& p : detail::counted_patterns(r)) counts = counts || replace(p).has_value();
      if (lm == 0 && rm == 0 && !counts) {
        rules.push_back(r);
        continue;
      }
      Rule next = r;
      next.origin = "FastDimer";
      if (r.rate.is_closed()) next.rate.expr = substitute(r.rate.expr, replace);
      auto pooled = [&](const std::vector<Species>& list) {
        std::vector<Species> res;
        for (const auto& s : list) {
          if (s == c.monomer) {
            res.push_back(mt);
          } else if (s == c.dimer) {
            res.push_back(mt);
            res.push_back(mt);
          } else {
            res.push_back(s);
          }
        }
        return res;
      };
      if (lm > 0) {
        auto lhs = lv.species_list();
        if (!r.rate.is_closed()) {
          RateExpr law = RateExpr::number(r.rate.k * detail::reaction_factor(lhs));
          for (const auto& [s, n] : detail::tally(lhs)) {
            if (s == c.monomer) {
              law = std::move(law) * detail::power_over_factorial(xm, n);
            } else if (s == c.dimer) {
              law = std::move(law) * detail::power_over_factorial(xm2, n);
            } else {
              law = std::move(law) * detail::binomial(s.expression(), n);
            }
          }
          next.rate = RateLaw::closed(std::move(law));
        }
        next = detail::species_rule(r.name, pooled(lhs), pooled(rv.species_list()), next.rate,
                                    "FastDimer");
        used_k = true;
      } else if (rm > 0) {
        std::size_t added = 0;
        for (std::size_t k = 0; k < rv.comps.size(); ++k) {
          if (!rv.species[k]) continue;
          std::size_t units = *rv.species[k] == c.monomer ? 1 : *rv.species[k] == c.dimer ? 2 : 0;
          if (units == 0) continue;
          for (int e : rv.entries[k]) next.rhs.entries[e].reset();
          added += units;
        }
        std::size_t at = std::max(next.lhs.entries.size(), next.rhs.entries.size());
        next.rhs.entries.resize(at);
        for (std::size_t k = 0; k < added; ++k) next.rhs.entries.emplace_back(Agent{pool, {}});
        detail::compact(next);
      }
      used_k = used_k || counts;
      step.rewritten_rules.push_back(r.name);
      rules.push_back(std::move(next));
    }
    cur.rules = std::move(rules);

    for (auto& o : cur.observables) {
      std::vector<Expression> ps;
      if (o.closed) {
        collect_patterns(o.expr, ps);
      } else {
        ps.push_back(o.pattern);
      }
      auto rewrite = [&](const Expression& p) -> std::optional<RateExpr> {
        double wm = instances(p, c.monomer);
        double wd = instances(p, c.dimer);
        if (wm == 0.0 && wd == 0.0) return std::nullopt;
        auto key = canonical_key(p);
        std::optional<RateExpr> e;
        if (key != c.monomer.key() && key != c.dimer.key()) e = RateExpr::count(p);
        auto add = [&](RateExpr term) { e = e ? std::move(*e) + std::move(term) : std::move(term); };
        if (wm != 0.0) add(wm == 1.0 ? xm : RateExpr::number(wm) * xm);
        if (wd != 0.0) add(wd == 1.0 ? xm2 : RateExpr::number(wd) * xm2);
        return e;
      };
      bool hit = false;
      for (const auto& p : ps) hit = hit || rewrite(p).has_value();
      if (!hit) continue;
      if (o.closed) {
        o.expr = substitute(o.expr, rewrite);
      } else {
        o.expr = *rewrite(o.pattern);
        o.closed = true;
        o.pattern = {};
      }
      used_k = true;
      step.justification.push_back("observable '" + o.name + "' re-expressed through " + pool + "()");
    }

    long long total0 = cur.initial_count(c.monomer) + 2 * cur.initial_count(c.dimer);
    std::erase_if(cur.init, [&](const InitEntry& e) {
      return e.species == c.monomer || e.species == c.dimer;
    });
    cur.init.push_back({mt, total0});
    if (used_k) {
      cur.constants.push_back({kname, c.K});
      step.introduced_constants.push_back({kname, c.K});
    }
    step.justification.push_back("initial " + pool + "() = " + std::to_string(total0));
    out.steps.push_back(std::move(step));
  }
  return out;
}

}  // namespace kred
