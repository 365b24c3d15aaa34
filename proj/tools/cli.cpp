#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kred/errors.hpp"
#include "kred/network.hpp"
#include "kred/reduce.hpp"
#include "kred/simulate.hpp"
#include "kred/system.hpp"

namespace kred::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

struct Options {
  std::string model;
  std::string reduced;
  std::string out;
  std::string format = "csv";
  std::string method = "direct";
  std::optional<std::uint64_t> seed;
  long long runs = 100;
  double t_end = 10.0;
  long long grid = 101;
  double volume = 1.0;
  long long enzyme_threshold = 10;
  std::vector<std::string> disable;
  std::vector<double> scale;
  std::size_t max_species = 1000;
  std::size_t max_reactions = 5000;
  unsigned threads = 0;
  bool ode = false;
};

[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorCode::Usage, msg); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Outputs {
 public:
  explicit Outputs(std::string dir) : dir_(std::move(dir)) {
    if (dir_.empty()) return;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create directory '" + dir_ + "': " + ec.message());
  }

  bool enabled() const { return !dir_.empty(); }

  void write(const std::string& name, const std::string& content) {
    fs::path p = fs::path(dir_) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f || !(f << content)) throw Error(ErrorCode::Io, "cannot write '" + p.string() + "'");
    written_.push_back(name);
  }

  const std::vector<std::string>& written() const { return written_; }

 private:
  std::string dir_;
  std::vector<std::string> written_;
};

std::string safe_name(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
  return out;
}

std::uint64_t resolve_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("KRED_SEED")) {
    try {
      std::size_t used = 0;
      unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    usage(std::string("KRED_SEED is not an unsigned integer: '") + env + "'");
  }
  return 0;
}

ReductionConfig reduction_config(const Options& o) {
  if (o.enzyme_threshold < 0) usage("--enzyme-threshold must be non-negative");
  ReductionConfig cfg;
  cfg.enzyme_copy_threshold = o.enzyme_threshold;
  for (const auto& raw : o.disable) {
    std::string d;
    for (char c : raw) d += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (d == "src") {
      cfg.enable_src = false;
    } else if (d == "me") {
      cfg.enable_me = false;
    } else if (d == "dimer" || d == "fastdimer") {
      cfg.enable_dimer = false;
    } else if (d == "enzymatic") {
      cfg.enable_enzymatic = false;
    } else {
      usage("unknown pattern '" + raw + "' for --disable (src, me, dimer, enzymatic)");
    }
  }
  return cfg;
}

SimConfig sim_config(const Options& o) {
  if (o.runs < 1) usage("--runs must be at least 1");
  if (o.grid < 1) usage("--grid must be at least 1");
  if (!(o.t_end > 0.0)) usage("--t-end must be positive");
  if (!(o.volume > 0.0)) usage("--volume must be positive");
  if (o.format != "csv" && o.format != "json") usage("--format must be csv or json");
  SimConfig cfg;
  cfg.t_end = o.t_end;
  cfg.sample_grid = uniform_grid(o.t_end, static_cast<std::size_t>(o.grid));
  cfg.n_runs = static_cast<std::size_t>(o.runs);
  cfg.seed = resolve_seed(o);
  cfg.volume = o.volume;
  cfg.threads = o.threads;
  if (o.method == "direct") {
    cfg.method = SsaMethod::Direct;
  } else if (o.method == "next-reaction") {
    cfg.method = SsaMethod::NextReaction;
  } else {
    usage("--method must be direct or next-reaction");
  }
  return cfg;
}

ExpandOptions expand_options(const Options& o) { return {o.max_species, o.max_reactions}; }

json model_entry(const std::string& path) { return {{"path", path}, {"fnv1a64", fnv1a_hex(read_file(path))}}; }

void write_manifest(Outputs& outputs, const std::string& command, const std::vector<std::string>& args,
                    const std::vector<std::string>& models, json config) {
  json m;
  m["tool"] = "kred";
  m["version"] = KRED_VERSION;
  m["command"] = command;
  m["args"] = args;
  json entries = json::array();
  for (const auto& p : models) entries.push_back(model_entry(p));
  m["models"] = entries;
  m["config"] = std::move(config);
  m["outputs"] = outputs.written();
  outputs.write("manifest.json", m.dump(2) + "\n");
}

json sim_json(const SimConfig& c) {
  return {{"t_end", c.t_end},
          {"grid_points", c.sample_grid.size()},
          {"runs", c.n_runs},
          {"seed", c.seed},
          {"volume", c.volume},
          {"method", c.method == SsaMethod::Direct ? "direct" : "next-reaction"}};
}

json reduction_json(const ReductionConfig& c) {
  return {{"enzyme_threshold", c.enzyme_copy_threshold},
          {"src", c.enable_src},
          {"me", c.enable_me},
          {"dimer", c.enable_dimer},
          {"enzymatic", c.enable_enzymatic}};
}

json number(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

json series(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

// ---------------------------------------------------------------- validate

int cmd_validate(const Options& o, std::ostream& out) {
  KappaSystem sys = load_model(o.model);
  auto scripts = validate_system(sys);
  out << o.model << ": valid, " << sys.signature.agents().size() << " agents, " << sys.rules.size()
      << " rules, " << sys.observables.size() << " observables\n";
  for (std::size_t i = 0; i < sys.rules.size(); ++i) {
    const Rule& r = sys.rules[i];
    out << "rule " << r.name << ": " << to_string(r) << '\n';
    for (const auto& op : scripts[i].ops) out << "  " << to_string(op, r) << '\n';
  }
  return Ok;
}

// ------------------------------------------------------------------ reduce

int cmd_reduce(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
  ReductionConfig rcfg = reduction_config(o);
  KappaSystem sys = load_model(o.model);
  validate_system(sys);
  auto [reduced, report] = reduce_all(sys, rcfg);
  std::string model = print_model(reduced);
  Outputs outputs(o.out);
  if (!outputs.enabled()) {
    out << model;
    std::istringstream text(report_text(report));
    for (std::string line; std::getline(text, line);) out << (line.empty() ? "#" : "# " + line) << '\n';
    return Ok;
  }
  outputs.write("reduced.ka", model);
  outputs.write("report.json", report_json(report));
  outputs.write("report.txt", report_text(report));
  write_manifest(outputs, "reduce", args, {o.model}, {{"reduction", reduction_json(rcfg)}});
  out << "rules " << report.rules_before << " -> " << report.rules_after << ", agents " << report.agents_before
      << " -> " << report.agents_after << '\n';
  return Ok;
}

// ---------------------------------------------------------------- simulate

std::string summary_csv(const EnsembleSummary& s, const ObservableSummary& o) {
  std::ostringstream csv;
  csv << "time,mean,std\n";
  for (std::size_t g = 0; g < s.times.size(); ++g) {
    csv << format_number(s.times[g]) << ',' << format_number(o.mean[g]) << ',' << format_number(o.std[g]) << '\n';
  }
  return csv.str();
}

json summary_json(const EnsembleSummary& s) {
  json j;
  j["times"] = s.times;
  j["n_runs"] = s.n_runs;
  json obs = json::array();
  for (const auto& o : s.observables) {
    json hs = json::array();
    for (const auto& h : o.histograms) {
      json counts = json::object();
      for (const auto& [bin, c] : h.counts) counts[format_number(h.bin_center(bin))] = c;
      hs.push_back({{"origin", h.origin}, {"width", h.width}, {"counts", counts}});
    }
    obs.push_back({{"name", o.name},
                   {"integer_valued", o.integer_valued},
                   {"mean", o.mean},
                   {"std", o.std},
                   {"histograms", hs}});
  }
  j["observables"] = obs;
  return j;
}

int cmd_simulate(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
  SimConfig cfg = sim_config(o);
  KappaSystem sys = load_model(o.model);
  validate_system(sys);
  ReactionNetwork net = expand(sys, expand_options(o));
  Outputs outputs(o.out);
  json config = {{"simulation", sim_json(cfg)},
                 {"max_species", o.max_species},
                 {"max_reactions", o.max_reactions},
                 {"format", o.format},
                 {"ode", o.ode}};

  if (o.ode) {
    std::vector<double> z0;
    for (auto x : net.init) z0.push_back(static_cast<double>(x) / cfg.volume);
    OdeTrajectory tr = ode_solve(net, z0, cfg);
    std::vector<std::vector<double>> cols(net.observables.size());
    for (const auto& z : tr.states) {
      for (std::size_t i = 0; i < net.observables.size(); ++i) cols[i].push_back(observe(net.observables[i], net, z));
    }
    std::string body;
    if (o.format == "json") {
      json j;
      j["times"] = tr.times;
      j["observables"] = json::object();
      for (std::size_t i = 0; i < cols.size(); ++i) j["observables"][net.observables[i].name] = cols[i];
      body = j.dump(2) + "\n";
    } else {
      std::ostringstream csv;
      csv << "time";
      for (const auto& ob : net.observables) csv << ',' << ob.name;
      csv << '\n';
      for (std::size_t g = 0; g < tr.times.size(); ++g) {
        csv << format_number(tr.times[g]);
        for (const auto& c : cols) csv << ',' << format_number(c[g]);
        csv << '\n';
      }
      body = csv.str();
    }
    if (!outputs.enabled()) {
      out << body;
      return Ok;
    }
    outputs.write(o.format == "json" ? "ode.json" : "ode.csv", body);
    write_manifest(outputs, "simulate", args, {o.model}, config);
    return Ok;
  }

  EnsembleSummary s = ensemble(net, cfg);
  if (!outputs.enabled()) {
    if (o.format == "json") {
      out << summary_json(s).dump(2) << '\n';
    } else {
      out << "time";
      for (const auto& ob : s.observables) out << ',' << ob.name << "_mean," << ob.name << "_std";
      out << '\n';
      for (std::size_t g = 0; g < s.times.size(); ++g) {
        out << format_number(s.times[g]);
        for (const auto& ob : s.observables) out << ',' << format_number(ob.mean[g]) << ',' << format_number(ob.std[g]);
        out << '\n';
      }
    }
    return Ok;
  }
  if (o.format == "json") {
    outputs.write("summary.json", summary_json(s).dump(2) + "\n");
  } else {
    for (const auto& ob : s.observables) outputs.write(safe_name(ob.name) + ".csv", summary_csv(s, ob));
  }
  write_manifest(outputs, "simulate", args, {o.model}, config);
  out << "simulated " << s.n_runs << " runs of " << net.species.size() << " species, " << net.reactions.size()
      << " reactions\n";
  return Ok;
}

// ----------------------------------------------------------------- compare

std::string comparison_csv(const Comparison& c, const ObservableComparison& o) {
  std::ostringstream csv;
  csv << "time,mean_orig,std_orig,mean_red,std_red,bhattacharyya\n";
  for (std::size_t g = 0; g < c.times.size(); ++g) {
    csv << format_number(c.times[g]) << ',' << format_number(o.mean_orig[g]) << ',' << format_number(o.std_orig[g])
        << ',' << format_number(o.mean_red[g]) << ',' << format_number(o.std_red[g]) << ','
        << format_distance(o.distance[g]) << '\n';
  }
  return csv.str();
}

json comparison_json(const Comparison& c) {
  json j;
  j["times"] = c.times;
  json obs = json::array();
  for (const auto& o : c.observables) {
    obs.push_back({{"name", o.name},
                   {"mean_orig", o.mean_orig},
                   {"std_orig", o.std_orig},
                   {"mean_red", o.mean_red},
                   {"std_red", o.std_red},
                   {"bhattacharyya", series(o.distance)},
                   {"time_average", number(o.time_average)},
                   {"early", number(o.early)},
                   {"late", number(o.late)}});
  }
  j["observables"] = obs;
  return j;
}

void check_common_observables(const KappaSystem& a, const KappaSystem& b) {
  bool any = std::any_of(a.observables.begin(), a.observables.end(), [&](const Observable& x) {
    return std::any_of(b.observables.begin(), b.observables.end(),
                       [&](const Observable& y) { return x.name == y.name; });
  });
  if (!any) throw Error(ErrorCode::Usage, "the two models have no observables in common");
}

int cmd_compare(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
  SimConfig cfg = sim_config(o);
  ReductionConfig rcfg = reduction_config(o);
  KappaSystem sys = load_model(o.model);
  validate_system(sys);
  Outputs outputs(o.out);
  json config = {{"simulation", sim_json(cfg)},
                 {"reduction", reduction_json(rcfg)},
                 {"max_species", o.max_species},
                 {"max_reactions", o.max_reactions},
                 {"format", o.format},
                 {"scale", o.scale}};
  std::vector<std::string> models = {o.model};

  if (!o.scale.empty()) {
    if (!o.reduced.empty()) usage("--scale reduces each rescaled model itself; drop --reduced");
    ScalingResult res = scaling_experiment(sys, {o.scale}, cfg, rcfg, expand_options(o));
    std::ostringstream summary;
    summary << "factor,observable,reduced_rules,time_average,early,late\n";
    for (const auto& row : res.rows) {
      for (const auto& c : row.comparison.observables) {
        summary << format_number(row.factor) << ',' << c.name << ',' << row.reduced_rules << ','
                << format_distance(c.time_average) << ',' << format_distance(c.early) << ','
                << format_distance(c.late) << '\n';
      }
    }
    if (!outputs.enabled()) {
      out << summary.str();
      return Ok;
    }
    outputs.write("scaling_summary.csv", summary.str());
    for (const auto& first : res.rows.front().comparison.observables) {
      std::ostringstream csv;
      csv << "time";
      for (const auto& row : res.rows) csv << ",bhattacharyya_N" << format_number(row.factor);
      csv << '\n';
      const auto& times = res.rows.front().comparison.times;
      for (std::size_t g = 0; g < times.size(); ++g) {
        csv << format_number(times[g]);
        for (const auto& row : res.rows) csv << ',' << format_distance(row.comparison.find(first.name)->distance[g]);
        csv << '\n';
      }
      outputs.write("scaling_" + safe_name(first.name) + ".csv", csv.str());
    }
    write_manifest(outputs, "compare", args, models, config);
    for (const auto& first : res.rows.front().comparison.observables) {
      out << first.name << ": time-averaged distance " << (res.decreasing(first.name) ? "decreases" : "does not decrease")
          << " with the scale factor\n";
    }
    return Ok;
  }

  KappaSystem reduced;
  if (!o.reduced.empty()) {
    reduced = load_model(o.reduced);
    validate_system(reduced);
    models.push_back(o.reduced);
  } else {
    auto [r, report] = reduce_all(sys, rcfg);
    if (report.steps.empty()) throw Error(ErrorCode::Reduction, "nothing to compare: no reduction applies to the model");
    reduced = std::move(r);
  }
  check_common_observables(sys, reduced);
  Comparison c = compare_systems(sys, reduced, cfg, expand_options(o));

  if (!outputs.enabled()) {
    if (o.format == "json") {
      out << comparison_json(c).dump(2) << '\n';
    } else {
      out << "observable,time,mean_orig,std_orig,mean_red,std_red,bhattacharyya\n";
      for (const auto& ob : c.observables) {
        std::istringstream rows(comparison_csv(c, ob));
        std::string line;
        std::getline(rows, line);
        while (std::getline(rows, line)) out << ob.name << ',' << line << '\n';
      }
    }
    return Ok;
  }
  if (o.format == "json") {
    outputs.write("compare.json", comparison_json(c).dump(2) + "\n");
  } else {
    for (const auto& ob : c.observables) outputs.write("compare_" + safe_name(ob.name) + ".csv", comparison_csv(c, ob));
  }
  if (o.reduced.empty()) outputs.write("reduced.ka", print_model(reduced));
  write_manifest(outputs, "compare", args, models, config);
  for (const auto& ob : c.observables) {
    out << ob.name << ": time-averaged distance " << format_distance(ob.time_average) << " (early "
        << format_distance(ob.early) << ", late " << format_distance(ob.late) << ")\n";
  }
  return Ok;
}

// ------------------------------------------------------------------ driver

int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Usage: return UsageError;
    case ErrorCode::Simulation:
    case ErrorCode::CapExceeded: return RuntimeAbort;
    default: return ModelError;
  }
}

void add_model(CLI::App* cmd, Options& o) {
  cmd->add_option("model", o.model, "Model file")->required();
}

void add_limits(CLI::App* cmd, Options& o) {
  cmd->add_option("--max-species", o.max_species, "Species cap of network expansion");
  cmd->add_option("--max-reactions", o.max_reactions, "Reaction cap of network expansion");
}

void add_reduction(CLI::App* cmd, Options& o) {
  cmd->add_option("--enzyme-threshold", o.enzyme_threshold, "Enzymes must start below this copy number");
  cmd->add_option("--disable", o.disable, "Pattern to skip: src, me, dimer, enzymatic")->delimiter(',');
}

void add_simulation(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Random seed (falls back to KRED_SEED, then 0)");
  cmd->add_option("--runs", o.runs, "Number of stochastic runs");
  cmd->add_option("--t-end", o.t_end, "End time");
  cmd->add_option("--grid", o.grid, "Number of equally spaced sample times including 0 and t-end");
  cmd->add_option("--volume", o.volume, "System volume");
  cmd->add_option("--method", o.method, "SSA variant: direct or next-reaction");
  cmd->add_option("--threads", o.threads, "Worker threads (0: all cores)");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--format", o.format, "csv or json");
  add_limits(cmd, o);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Reduce and simulate rule-based models", "kred"};
  app.set_version_flag("--version", KRED_VERSION);
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "Check a model and print per-rule edit scripts");
  add_model(validate, o);

  auto* reduce = app.add_subcommand("reduce", "Apply the reduction passes");
  add_model(reduce, o);
  add_reduction(reduce, o);
  reduce->add_option("--out", o.out, "Output directory");

  auto* simulate = app.add_subcommand("simulate", "Run an SSA ensemble or the ODE limit");
  add_model(simulate, o);
  add_simulation(simulate, o);
  simulate->add_flag("--ode", o.ode, "Integrate the deterministic limit instead");

  auto* compare = app.add_subcommand("compare", "Compare a model with its reduction");
  add_model(compare, o);
  add_simulation(compare, o);
  add_reduction(compare, o);
  compare->add_option("--reduced", o.reduced, "Reduced model to compare against");
  compare->add_option("--scale", o.scale, "Scale factors for the enzymatic scaling experiment")->delimiter(',');

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? Ok : UsageError;
  }

  try {
    if (validate->parsed()) return cmd_validate(o, out);
    if (reduce->parsed()) return cmd_reduce(o, args, out);
    if (simulate->parsed()) return cmd_simulate(o, args, out);
    return cmd_compare(o, args, out);
  } catch (const Error& e) {
    err << "kred: ";
    if (!o.model.empty() && e.location().known()) {
      err << o.model << ':' << e.location().line << ':' << e.location().column << ": " << code_name(e.code()) << ": "
          << e.message() << '\n';
    } else {
      err << e.what() << '\n';
    }
    return exit_code(e);
  } catch (const std::exception& e) {
    err << "kred: " << e.what() << '\n';
    return RuntimeAbort;
  }
}

}  // namespace kred::cli
