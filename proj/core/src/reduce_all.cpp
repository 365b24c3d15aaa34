#include <algorithm>
#include <sstream>

#include "json.hpp"

#include "kred/reduce.hpp"

namespace kred {

namespace {

void append_unique(std::vector<std::string>& into, const std::vector<std::string>& from) {
  for (const auto& s : from) {
    if (std::find(into.begin(), into.end(), s) == into.end()) into.push_back(s);
  }
}

}  // namespace

std::pair<KappaSystem, ReductionReport> reduce_all(const KappaSystem& sys, const ReductionConfig& cfg) {
  ReductionReport report;
  report.rules_before = sys.rules.size();
  report.agents_before = sys.used_agents().size();
  KappaSystem cur = sys;
  auto run = [&](bool enabled, auto&& pass) {
    if (!enabled) return;
    PassResult r = pass(cur);
    cur = std::move(r.system);
    for (auto& s : r.steps) report.steps.push_back(std::move(s));
    append_unique(report.notes, r.notes);
  };
  auto me = [&](const KappaSystem& s) { return modifier_elimination(s); };
  auto src = [&](const KappaSystem& s) { return similar_rule_composition(s); };
  auto dimer = [&](const KappaSystem& s) { return fast_dimerization_reduce(s, cfg); };
  auto enz = [&](const KappaSystem& s) { return generalized_enzymatic_reduce(s, cfg); };

  run(cfg.enable_me, me);
  run(cfg.enable_src, src);
  run(cfg.enable_dimer, dimer);
  run(cfg.enable_me, me);
  run(cfg.enable_src, src);
  run(cfg.enable_enzymatic, enz);
  run(cfg.enable_me, me);
  run(cfg.enable_src, src);

  cur.signature = cur.signature.restricted_to(cur.used_agents());
  report.rules_after = cur.rules.size();
  report.agents_after = cur.used_agents().size();
  return {std::move(cur), std::move(report)};
}

namespace {

nlohmann::json step_json(const ReductionStep& s) {
  nlohmann::json j;
  j["pass"] = pass_name(s.kind);
  j["removed_rules"] = s.removed_rules;
  j["added_rules"] = s.added_rules;
  j["rewritten_rules"] = s.rewritten_rules;
  j["removed_species"] = s.removed_species;
  auto consts = nlohmann::json::array();
  for (const auto& c : s.introduced_constants) consts.push_back({{"name", c.name}, {"value", c.value}});
  j["introduced_constants"] = consts;
  j["justification"] = s.justification;
  j["advisories"] = s.advisories;
  return j;
}

void list(std::ostringstream& out, const char* label, const std::vector<std::string>& items) {
  if (items.empty()) return;
  out << "  " << label << ":";
  for (const auto& s : items) out << ' ' << s;
  out << '\n';
}

}  // namespace

std::string report_json(const ReductionReport& r) {
  nlohmann::json j;
  j["rules_before"] = r.rules_before;
  j["rules_after"] = r.rules_after;
  j["agents_before"] = r.agents_before;
  j["agents_after"] = r.agents_after;
  auto steps = nlohmann::json::array();
  for (const auto& s : r.steps) steps.push_back(step_json(s));
  j["steps"] = steps;
  j["notes"] = r.notes;
  return j.dump(2) + "\n";
}

std::string report_text(const ReductionReport& r) {
  std::ostringstream out;
  out << "rules: " << r.rules_before << " -> " << r.rules_after << '\n';
  out << "agents: " << r.agents_before << " -> " << r.agents_after << '\n';
  for (std::size_t i = 0; i < r.steps.size(); ++i) {
    const auto& s = r.steps[i];
    out << '\n' << (i + 1) << ". " << pass_name(s.kind) << '\n';
    list(out, "removed rules", s.removed_rules);
    list(out, "added rules", s.added_rules);
    list(out, "rewritten rules", s.rewritten_rules);
    list(out, "removed species", s.removed_species);
    for (const auto& c : s.introduced_constants) {
      out << "  constant " << c.name << " = " << format_number(c.value) << '\n';
    }
    for (const auto& j : s.justification) out << "  - " << j << '\n';
    for (const auto& a : s.advisories) out << "  advisory: " << a << '\n';
  }
  if (!r.notes.empty()) {
    out << "\nnotes:\n";
    for (const auto& n : r.notes) out << "  - " << n << '\n';
  }
  return out.str();
}

}  // namespace kred
