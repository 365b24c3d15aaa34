#include "kred/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

#include "kred/embedding.hpp"
#include "kred/errors.hpp"

namespace kred {

double CompiledExpr::sqrt_(double v) { return std::sqrt(v); }

std::vector<int> CompiledExpr::dependencies() const {
  std::set<int> out;
  for (const auto& in : program_) {
    for (const auto& [s, w] : in.weights) out.insert(s);
  }
  return {out.begin(), out.end()};
}

int Reaction::order() const {
  int n = 0;
  for (const auto& c : consume) n += c.count;
  return n;
}

int ReactionNetwork::find(const std::string& key) const {
  for (std::size_t i = 0; i < species.size(); ++i) {
    if (species[i].key() == key) return static_cast<int>(i);
  }
  return -1;
}

const NetObservable* ReactionNetwork::observable(const std::string& name) const {
  for (const auto& o : observables) {
    if (o.name == name) return &o;
  }
  return nullptr;
}

double instances(const Expression& pattern, const Species& sp) {
  auto n = embeddings(pattern, sp.expression()).size();
  return static_cast<double>(n) / static_cast<double>(automorphism_count(pattern));
}

namespace {

void emit(const RateExpr& e, const std::vector<Species>& species, const ConstantTable& constants,
          std::vector<CompiledExpr::Instr>& out, int depth, int& max_depth) {
  using Op = RateExpr::Op;
  max_depth = std::max(max_depth, depth + 1);
  switch (e.op) {
    case Op::Number:
      out.push_back({Op::Number, e.value, {}});
      return;
    case Op::Constant: {
      auto it = constants.find(e.name);
      if (it == constants.end()) throw Error(ErrorCode::Rule, "unknown constant '" + e.name + "'");
      out.push_back({Op::Number, it->second, {}});
      return;
    }
    case Op::Count: {
      CompiledExpr::Instr in{Op::Count, 0.0, {}};
      for (std::size_t s = 0; s < species.size(); ++s) {
        double w = instances(e.pattern, species[s]);
        if (w != 0.0) in.weights.emplace_back(static_cast<int>(s), w);
      }
      out.push_back(std::move(in));
      return;
    }
    case Op::Sqrt:
      emit(e.args[0], species, constants, out, depth, max_depth);
      out.push_back({Op::Sqrt, 0.0, {}});
      return;
    default:
      emit(e.args[0], species, constants, out, depth, max_depth);
      emit(e.args[1], species, constants, out, depth + 1, max_depth);
      out.push_back({e.op, 0.0, {}});
  }
}

struct PreparedRule {
  const Rule* rule;
  EditScript script;
  LinkedGraph lhs;
  std::vector<LinkedGraph> components;
};

std::vector<SpeciesCount> tally(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  std::vector<SpeciesCount> out;
  for (int id : ids) {
    if (!out.empty() && out.back().species == id) {
      ++out.back().count;
    } else {
      out.push_back({id, 1});
    }
  }
  return out;
}

class Expander {
 public:
  Expander(const KappaSystem& sys, const ExpandOptions& opts) : sys_(sys), opts_(opts) {}

  ReactionNetwork run() {
    for (const auto& r : sys_.rules) prepare(r);
    for (const auto& e : sys_.init) intern(e.species);
    for (auto& pr : rules_) {
      if (pr.components.empty()) fire(pr, {});
    }
    for (std::size_t s = 0; s < net_.species.size(); ++s) visit(static_cast<int>(s));
    finish();
    return std::move(net_);
  }

 private:
  void prepare(const Rule& r) {
    if (!r.rate.is_closed() && r.rate.k == 0.0) return;
    PreparedRule pr{&r, validate_rule(r, sys_.signature), link(r.lhs), {}};
    for (const auto& c : components(r.lhs)) {
      if (r.rate.is_closed() && !is_mixture(c, sys_.signature)) {
        throw Error(ErrorCode::Rule,
                    "rule '" + r.name +
                        "' has a closed rate law, so its left side must consist of species",
                    r.loc);
      }
      pr.components.push_back(link(c));
    }
    fits_.emplace_back(pr.components.size());
    rules_.push_back(std::move(pr));
  }

  int intern(const Species& sp) {
    auto it = index_.find(sp.key());
    if (it != index_.end()) return it->second;
    if (net_.species.size() >= opts_.max_species) {
      throw CapExceeded(CapExceeded::Which::Species, opts_.max_species);
    }
    int id = static_cast<int>(net_.species.size());
    index_.emplace(sp.key(), id);
    net_.species.push_back(sp);
    linked_.push_back(link(sp.expression()));
    return id;
  }

  void visit(int s) {
    for (std::size_t r = 0; r < rules_.size(); ++r) {
      auto& pr = rules_[r];
      if (pr.components.empty()) continue;
      bool any = false;
      for (std::size_t c = 0; c < pr.components.size(); ++c) {
        if (embeds(pr.components[c], linked_[s])) {
          fits_[r][c].push_back(s);
          any = true;
        }
      }
      if (!any) continue;
      std::set<int> pool;
      for (const auto& f : fits_[r]) pool.insert(f.begin(), f.end());
      std::vector<int> candidates(pool.begin(), pool.end());
      std::vector<int> chosen;
      for (std::size_t size = 1; size <= pr.components.size(); ++size) {
        choose(pr, candidates, size, 0, s, chosen);
      }
    }
  }

  // Multisets of `size` species whose largest member is `s`.
  void choose(PreparedRule& pr, const std::vector<int>& candidates, std::size_t size,
              std::size_t from, int s, std::vector<int>& chosen) {
    if (chosen.size() + 1 == size) {
      chosen.push_back(s);
      fire(pr, chosen);
      chosen.pop_back();
      return;
    }
    for (std::size_t i = from; i < candidates.size() && candidates[i] <= s; ++i) {
      chosen.push_back(candidates[i]);
      choose(pr, candidates, size, i, s, chosen);
      chosen.pop_back();
    }
  }

  void fire(PreparedRule& pr, const std::vector<int>& consumed) {
    LinkedGraph mixture;
    std::vector<int> copy_of;
    for (std::size_t k = 0; k < consumed.size(); ++k) {
      const auto& g = linked_[consumed[k]];
      int offset = static_cast<int>(mixture.size());
      for (std::size_t a = 0; a < g.size(); ++a) {
        mixture.agents.push_back(g.agents[a]);
        auto row = g.partner[a];
        for (auto& p : row) {
          if (p) p->agent += offset;
        }
        mixture.partner.push_back(std::move(row));
        copy_of.push_back(static_cast<int>(k));
      }
    }
    std::map<std::vector<int>, std::size_t> outcomes;
    std::vector<std::vector<int>> order;
    for (const auto& emb : embeddings(pr.lhs, mixture)) {
      std::vector<bool> hit(consumed.size(), false);
      for (int t : emb.image) hit[copy_of[t]] = true;
      if (std::find(hit.begin(), hit.end(), false) != hit.end()) continue;
      LinkedGraph next = mixture;
      apply_rule(*pr.rule, pr.script, emb.image, next);
      std::vector<Species> made;
      for (const auto& c : components(unlink(next))) made.emplace_back(c, sys_.signature);
      std::sort(made.begin(), made.end());
      std::vector<int> ids;
      for (const auto& sp : made) ids.push_back(intern(sp));
      std::sort(ids.begin(), ids.end());
      auto [it, fresh] = outcomes.emplace(ids, 0);
      if (fresh) order.push_back(ids);
      ++it->second;
    }
    if (order.empty()) return;
    const Rule& rule = *pr.rule;
    if (rule.rate.is_closed() && order.size() > 1) {
      throw Error(ErrorCode::Rule,
                  "rule '" + rule.name + "' with a closed rate law has several outcomes", rule.loc);
    }
    auto consume = tally(consumed);
    double denom = 1.0;
    for (const auto& c : consume) denom *= std::tgamma(c.count + 1.0);
    for (const auto& ids : order) {
      Reaction rx;
      rx.consume = consume;
      rx.produce = tally(ids);
      if (rx.consume == rx.produce) continue;
      std::map<int, int> net;
      for (const auto& c : rx.consume) net[c.species] -= c.count;
      for (const auto& c : rx.produce) net[c.species] += c.count;
      for (const auto& [sp, n] : net) {
        if (n != 0) rx.stoich.push_back({sp, n});
      }
      rx.source_rule = rule.name;
      if (rule.rate.is_closed()) {
        rx.kind = RateLaw::Kind::Closed;
        rx.closed = static_cast<int>(pending_closed_.size());
        pending_closed_.push_back(&rule.rate.expr);
      } else {
        rx.k = rule.rate.k * static_cast<double>(outcomes[ids]) / denom;
      }
      if (net_.reactions.size() >= opts_.max_reactions) {
        throw CapExceeded(CapExceeded::Which::Reactions, opts_.max_reactions);
      }
      net_.reactions.push_back(std::move(rx));
    }
  }

  void finish() {
    auto constants = sys_.constant_table();
    for (const auto* e : pending_closed_) {
      net_.closed_laws.push_back(compile(*e, net_.species, constants));
    }
    net_.init.assign(net_.species.size(), 0);
    for (const auto& e : sys_.init) net_.init[index_.at(e.species.key())] += e.count;
    for (const auto& o : sys_.observables) {
      NetObservable no;
      no.name = o.name;
      if (o.closed) {
        no.closed = static_cast<int>(net_.closed_laws.size());
        no.integer_valued = false;
        net_.closed_laws.push_back(compile(o.expr, net_.species, constants));
      } else {
        double aut = static_cast<double>(automorphism_count(o.pattern));
        for (std::size_t s = 0; s < net_.species.size(); ++s) {
          double n = static_cast<double>(embeddings(link(o.pattern), linked_[s]).size());
          if (n == 0.0) continue;
          no.weights.emplace_back(static_cast<int>(s), n / aut);
          if (std::fmod(n, aut) != 0.0) no.integer_valued = false;
        }
      }
      net_.observables.push_back(std::move(no));
    }
  }

  const KappaSystem& sys_;
  ExpandOptions opts_;
  std::vector<PreparedRule> rules_;
  std::vector<std::vector<std::vector<int>>> fits_;  // [rule][component] -> species
  std::unordered_map<std::string, int> index_;
  std::vector<LinkedGraph> linked_;
  std::vector<const RateExpr*> pending_closed_;
  ReactionNetwork net_;
};

}  // namespace

CompiledExpr compile(const RateExpr& e, const std::vector<Species>& species,
                     const ConstantTable& constants) {
  std::vector<CompiledExpr::Instr> program;
  int depth = 0;
  emit(e, species, constants, program, 0, depth);
  if (depth > 60) throw Error(ErrorCode::Rule, "rate expression nested too deeply");
  return CompiledExpr(std::move(program));
}

ReactionNetwork expand(const KappaSystem& sys, const ExpandOptions& opts) {
  if (opts.max_species == 0 || opts.max_reactions == 0) {
    throw Error(ErrorCode::Usage, "expansion caps must be positive");
  }
  return Expander(sys, opts).run();
}

std::vector<double> ode_rhs(const ReactionNetwork& net, std::span<const double> z, double volume) {
  std::vector<double> dz(net.species.size(), 0.0);
  for (const auto& rx : net.reactions) {
    double rate;
    if (rx.kind == RateLaw::Kind::Closed) {
      rate = net.closed_laws[rx.closed](z);
    } else {
      rate = rx.k * std::pow(volume, rx.order() - 1);
      for (const auto& c : rx.consume) rate *= std::pow(z[c.species], c.count);
    }
    for (const auto& s : rx.stoich) dz[s.species] += s.count * rate;
  }
  return dz;
}

std::vector<std::vector<int>> reaction_inputs(const ReactionNetwork& net) {
  std::vector<std::vector<int>> out;
  out.reserve(net.reactions.size());
  for (const auto& rx : net.reactions) {
    std::set<int> in;
    for (const auto& c : rx.consume) in.insert(c.species);
    if (rx.kind == RateLaw::Kind::Closed) {
      for (int s : net.closed_laws[rx.closed].dependencies()) in.insert(s);
    }
    out.emplace_back(in.begin(), in.end());
  }
  return out;
}

}  // namespace kred
