#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kred/system.hpp"

namespace kred {

enum class PassKind { SRC, ME, FastDimer, Enzymatic, GeneralizedEnzymatic };

std::string_view pass_name(PassKind k);

struct ReductionConfig {
  long long enzyme_copy_threshold = 10;
  bool enable_src = true;
  bool enable_me = true;
  bool enable_dimer = true;
  bool enable_enzymatic = true;
  int max_passes = 1000;  // per pass, guards against oscillation
};

struct ReductionStep {
  PassKind kind = PassKind::SRC;
  std::vector<std::string> removed_rules;
  std::vector<std::string> added_rules;
  std::vector<std::string> rewritten_rules;
  std::vector<std::string> removed_species;  // printed species
  std::vector<Constant> introduced_constants;
  std::vector<std::string> justification;
  std::vector<std::string> advisories;
};

struct ReductionReport {
  std::vector<ReductionStep> steps;
  std::vector<std::string> notes;  // candidates that failed a check
  std::size_t rules_before = 0;
  std::size_t rules_after = 0;
  std::size_t agents_before = 0;
  std::size_t agents_after = 0;
};

struct PassResult {
  KappaSystem system;
  std::vector<ReductionStep> steps;
  std::vector<std::string> notes;
};

/// Merges rules that are equal as rewrites (both sides and their agent
/// alignment) and carry the same kind of rate law; rates are summed.
PassResult similar_rule_composition(const KappaSystem& sys);

/// Removes species that are modifiers or absent in every rule (modifier in
/// at least one) and are not observed, folding their constant count into
/// the rates. Iterates to a fixpoint.
PassResult modifier_elimination(const KappaSystem& sys);

struct DimerCandidate {
  Species monomer;
  Species dimer;
  std::string forward;   // M,M -> M2
  std::string backward;  // M2 -> M,M
  double k = 0.0;
  double k_minus = 0.0;
  double K = 0.0;  // equilibrium constant on copy numbers: x_M2 = K x_M^2
};

std::vector<DimerCandidate> detect_dimerization(const KappaSystem& sys,
                                                std::vector<std::string>* notes = nullptr);

/// Monomer and dimer amounts for total M_T = x_M + 2 x_M2 at equilibrium
/// K x_M^2 = x_M2.
std::pair<double, double> dimer_partition(double m_total, double K);

PassResult fast_dimerization_reduce(const KappaSystem& sys, const ReductionConfig& cfg);

struct EnzymeBranch {
  std::vector<Species> substrates{};
  Species complex;
  std::vector<Species> products{};
  std::string binding{};
  std::optional<std::string> unbinding{};
  std::string catalytic{};
  double k_bind = 0.0;    // per-reaction constants of the expanded network
  double k_unbind = 0.0;
  double k_cat = 0.0;
  bool complex_retained = false;  // catalysis keeps the complex: C -> C + P
  double K = 0.0;
};

struct EnzymaticGroup {
  Species enzyme;
  long long enzyme_total = 0;
  std::vector<EnzymeBranch> branches;
};

std::vector<EnzymaticGroup> detect_enzymatic(const KappaSystem& sys, const ReductionConfig& cfg,
                                             std::vector<std::string>* notes = nullptr);

PassResult generalized_enzymatic_reduce(const KappaSystem& sys, const ReductionConfig& cfg);

/// ME; SRC; FastDimer; ME; SRC; GeneralizedEnzymatic; ME; SRC, each pass
/// to its own fixpoint. Agents no longer used are dropped from the
/// signature.
std::pair<KappaSystem, ReductionReport> reduce_all(const KappaSystem& sys,
                                                   const ReductionConfig& cfg = {});

std::string report_json(const ReductionReport& r);
std::string report_text(const ReductionReport& r);

}  // namespace kred
