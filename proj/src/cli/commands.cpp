#include "wbx/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "wbx/adaptation.hpp"
#include "wbx/cli/generators.hpp"
#include "wbx/csv.hpp"
#include "wbx/equilibrium.hpp"
#include "wbx/scenario_io.hpp"
#include "wbx/simulator.hpp"

namespace wbx::cli {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNegativeRate:
    case ErrorCode::kSingularUnexpected:
    case ErrorCode::kDegenerate:
      return kExitNoEquilibrium;
    case ErrorCode::kStall:
    case ErrorCode::kNonpositiveObservation:
      return kExitStall;
    default:
      return kExitValidation;
  }
}

namespace {

using csv::real;

std::string str(std::uint64_t v) { return std::to_string(v); }

// Either the caller's stream or a file opened for --out.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error(ErrorCode::kConfig, "cannot write '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

struct ScenarioSource {
  std::string config;
  std::vector<std::size_t> groups{10, 10};
  double w_lo = 1.0;
  double w_hi = 2.0;
  double g = 1.0;
  std::uint64_t gen_seed = 1;
};

struct ResolvedScenario {
  Scenario scenario;
  std::optional<std::uint64_t> seed;  // from the config file
  bool generated = false;
};

void add_scenario_options(CLI::App* cmd, ScenarioSource& src) {
  cmd->add_option("--config", src.config, "Scenario JSON file");
  cmd->add_option("--groups", src.groups, "Generated group sizes, one per file")
      ->delimiter(',');
  cmd->add_option("--w-lo", src.w_lo, "Generated waiting cost lower bound");
  cmd->add_option("--w-hi", src.w_hi, "Generated waiting cost upper bound");
  cmd->add_option("--g", src.g, "Generated transmission cost");
  cmd->add_option("--gen-seed", src.gen_seed, "Seed for the scenario generator");
}

ResolvedScenario resolve(const ScenarioSource& src) {
  ResolvedScenario out;
  if (!src.config.empty()) {
    ScenarioFile file = load_scenario(src.config);
    out.scenario = std::move(file.scenario);
    out.seed = file.seed;
  } else {
    out.scenario = generate_scenario(
        GeneratorSpec{src.groups, src.w_lo, src.w_hi, src.g, src.gen_seed});
    out.generated = true;
  }
  require_valid(out.scenario);
  return out;
}

void dump_if_generated(const ResolvedScenario& r, const std::string& out_path) {
  if (r.generated && !out_path.empty()) {
    save_scenario(out_path + ".scenario.json", r.scenario);
  }
}

std::vector<std::uint64_t> seeds_or(const std::vector<std::uint64_t>& seeds,
                                    const ResolvedScenario& r) {
  if (!seeds.empty()) return seeds;
  return {r.seed.value_or(1)};
}

// -- ne ---------------------------------------------------------------------

struct NeOptions {
  ScenarioSource src;
  double alpha = kDefaultAlpha;
  bool coded = false;
  bool allow_signed = false;
  std::string out;
};

void emit_node_rates(std::ostream& o, const Scenario& s, const StrategyProfile& p) {
  for (std::uint32_t n = 0; n < s.node_count(); ++n) {
    const NodeId id{n};
    const NodeSpec& spec = s.node(id);
    const std::string w = real(spec.cost.w), g = real(spec.cost.g);
    const std::string needs = str(spec.needs.value);
    csv::row(o, {"gamma", str(n), "", w, g, needs, real(p.gamma(id))});
    for (std::uint32_t x = 0; x < s.file_count(); ++x) {
      if (auto l = p.lambda(id, FileId{x})) {
        csv::row(o, {"lambda", str(n), str(x), w, g, needs, real(*l)});
      }
    }
  }
}

int cmd_ne(const NeOptions& opt, std::ostream& out) {
  const ResolvedScenario r = resolve(opt.src);
  const Scenario& s = r.scenario;
  const RatePolicy policy =
      opt.allow_signed ? RatePolicy::kAllowSigned : RatePolicy::kRequireNonnegative;
  const bool coded = opt.coded || s.file_count() > 2;

  Sink sink(opt.out, out);
  std::ostream& o = *sink;
  csv::row(o, {"record", "node", "file", "w", "g", "needs", "value"});
  if (!coded) {
    const TwoFileEquilibrium eq = two_file_equilibrium(s, opt.alpha, policy);
    csv::row(o, {"alpha", "", "", "", "", "", real(eq.alpha)});
    csv::row(o, {"That", "", "0", "", "", "", real(eq.That_A)});
    csv::row(o, {"That", "", "1", "", "", "", real(eq.That_B)});
    emit_node_rates(o, s, eq.profile);
  } else {
    const CodedEquilibrium eq = coded_equilibrium(s, policy);
    csv::row(o, {"degenerate", "", "", "", "", "", eq.degenerate ? "1" : "0"});
    if (eq.degenerate) {
      for (std::uint32_t x = 0; x < s.file_count(); ++x) {
        csv::row(o, {"Gamma_particular", "", str(x), "", "", "",
                     real(eq.family->particular[x])});
      }
      for (const auto& v : eq.family->null_basis) {
        for (std::uint32_t x = 0; x < s.file_count(); ++x) {
          csv::row(o, {"Gamma_null", "", str(x), "", "", "", real(v[x])});
        }
      }
    } else {
      for (std::uint32_t x = 0; x < s.file_count(); ++x) {
        csv::row(o, {"Gamma", "", str(x), "", "", "", real(eq.Gamma[x])});
      }
      emit_node_rates(o, s, *eq.profile);
    }
  }
  dump_if_generated(r, opt.out);
  return kExitOk;
}

// -- poa --------------------------------------------------------------------

struct PoaOptions {
  ScenarioSource src;
  std::string out;
};

int cmd_poa(const PoaOptions& opt, std::ostream& out) {
  const ResolvedScenario r = resolve(opt.src);
  const Scenario& s = r.scenario;
  Sink sink(opt.out, out);
  std::ostream& o = *sink;
  csv::row(o, {"node", "w", "g", "needs", "node_cost", "transmit_probability",
               "poa_node", "poa_system", "throughput"});
  for (std::uint32_t n = 0; n < s.node_count(); ++n) {
    const NodeId id{n};
    const NodeCost c = node_cost_at_ne(id, s);
    csv::row(o, {str(n), real(s.cost(id).w), real(s.cost(id).g), str(s.needs(id).value),
                 real(c.cost), real(c.transmit_probability), real(poa_node(id, s)), "",
                 ""});
  }
  csv::row(o, {"system", "", "", "", "", "", "", real(poa_system(s)),
               real(throughput_at_ne(s))});
  dump_if_generated(r, opt.out);
  return kExitOk;
}

// -- simulate ---------------------------------------------------------------

struct SimulateOptions {
  ScenarioSource src;
  double alpha = kDefaultAlpha;
  bool coded = false;
  std::uint64_t rounds = 100000;
  std::vector<std::uint64_t> seeds;
  std::string trace;
  std::string out;
};

StrategyProfile equilibrium_profile(const Scenario& s, bool coded, double alpha) {
  if (!coded) return two_file_equilibrium(s, alpha).profile;
  const CodedSystem sys = build_coded_system(s);
  const CodedEquilibrium eq = coded_equilibrium(s);
  if (!eq.degenerate) return *eq.profile;
  return coded_profile(s, sys, two_file_family_point(sys, alpha));
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& out) {
  const ResolvedScenario r = resolve(opt.src);
  const Scenario& s = r.scenario;
  const bool coded = opt.coded || s.file_count() > 2;
  const StrategyProfile profile = equilibrium_profile(s, coded, opt.alpha);
  const auto seeds = seeds_or(opt.seeds, r);

  std::unique_ptr<std::ofstream> trace;
  if (!opt.trace.empty()) {
    trace = std::make_unique<std::ofstream>(opt.trace);
    if (!*trace) throw Error(ErrorCode::kConfig, "cannot write '" + opt.trace + "'");
    csv::row(*trace, {"round", "initiator", "responder", "t_init", "t_resp", "duration"});
  }

  Sink sink(opt.out, out);
  std::ostream& o = *sink;
  csv::row(o, {"seed", "node", "w", "g", "needs", "downloads", "uploads", "avg_cost",
               "throughput"});
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    SimConfig cfg{s, profile, opt.rounds, seeds[i], coded, 0, {}};
    if (trace && i == 0) {
      std::ostream& t = *trace;
      cfg.on_round = [&t](const RoundRecord& rec) {
        csv::row(t, {str(rec.round), str(rec.initiator.value), str(rec.responder.value),
                     real(rec.t_init), real(rec.t_resp), real(rec.duration)});
      };
    }
    const SimResult res = run_simulation(cfg);
    const Metrics& m = res.metrics;
    std::uint64_t total_d = 0, total_u = 0;
    double cost_sum = 0.0;
    const std::string seed = str(seeds[i]);
    for (std::uint32_t n = 0; n < s.node_count(); ++n) {
      const NodeId id{n};
      total_d += m.downloads(id);
      total_u += m.uploads(id);
      cost_sum += m.avg_total_cost(id);
      csv::row(o, {seed, str(n), real(s.cost(id).w), real(s.cost(id).g),
                   str(s.needs(id).value), str(m.downloads(id)), str(m.uploads(id)),
                   real(m.avg_total_cost(id)), real(m.node_throughput(id))});
    }
    csv::row(o, {seed, "system", "", "", "", str(total_d), str(total_u),
                 real(cost_sum / static_cast<double>(s.node_count())),
                 real(m.per_node_throughput())});
  }
  dump_if_generated(r, opt.out);
  return kExitOk;
}

// -- adapt ------------------------------------------------------------------

struct AdaptOptions {
  ScenarioSource src;
  AdaptConfig cfg;
  std::vector<std::uint64_t> seeds;
  std::string node_trace;
  std::string out;
};

void add_adapt_options(CLI::App* cmd, AdaptConfig& cfg) {
  cmd->add_option("--updates", cfg.updates, "Number of rate updates");
  cmd->add_option("--epoch-rounds", cfg.epoch_rounds, "Rounds between updates (M)");
  cmd->add_option("--epsilon", cfg.epsilon, "Step schedule scale, delta_k = epsilon/k");
  cmd->add_option("--guess-factor", cfg.guess_factor,
                  "Initial overestimate of the group size");
}

int cmd_adapt(const AdaptOptions& opt, std::ostream& out, std::ostream& err) {
  const ResolvedScenario r = resolve(opt.src);
  const Scenario& s = r.scenario;
  const auto seeds = seeds_or(opt.seeds, r);

  std::unique_ptr<std::ofstream> nodes;
  if (!opt.node_trace.empty()) {
    nodes = std::make_unique<std::ofstream>(opt.node_trace);
    if (!*nodes) throw Error(ErrorCode::kConfig, "cannot write '" + opt.node_trace + "'");
    csv::row(*nodes, {"seed", "epoch", "node", "That_nk", "rate"});
  }

  Sink sink(opt.out, out);
  std::ostream& o = *sink;
  csv::row(o, {"seed", "epoch", "delta_k", "observed_inv_That_A", "observed_inv_That_B",
               "throughput"});
  for (std::uint64_t seed : seeds) {
    const AdaptRun run = run_adaptive_simulation(s, opt.cfg, seed);
    for (const std::string& w : run.final_state.warnings) err << "warning: " << w << '\n';
    for (const EpochRecord& e : run.epochs) {
      csv::row(o, {str(seed), str(e.epoch), real(e.delta), real(e.observed_inv_That_A),
                   real(e.observed_inv_That_B), real(e.throughput)});
    }
    if (nodes) {
      for (const NodeEpochRecord& n : run.nodes) {
        csv::row(*nodes, {str(seed), str(n.epoch), str(n.node.value), real(n.That),
                          real(n.rate)});
      }
    }
  }
  dump_if_generated(r, opt.out);
  return kExitOk;
}

// -- fig2 -------------------------------------------------------------------

struct Fig2Options {
  ScenarioSource src;
  AdaptConfig cfg;
  std::vector<std::uint64_t> seeds;
  std::string out;
};

int cmd_fig2(const Fig2Options& opt, std::ostream& out) {
  std::vector<std::uint64_t> seeds = opt.seeds;
  if (seeds.empty()) {
    for (std::uint64_t i = 1; i <= 20; ++i) seeds.push_back(i);
  }
  const std::size_t epochs = opt.cfg.updates + 1;
  std::vector<std::vector<double>> per_epoch(epochs);
  double ne_sum = 0.0;
  std::vector<std::pair<std::uint64_t, Scenario>> generated;

  for (std::uint64_t seed : seeds) {
    ScenarioSource src = opt.src;
    src.gen_seed = seed;
    const ResolvedScenario r = resolve(src);
    if (r.generated) generated.emplace_back(seed, r.scenario);
    ne_sum += throughput_at_ne(r.scenario);
    const AdaptRun run = run_adaptive_simulation(r.scenario, opt.cfg, mix_seed(seed, 1));
    for (const EpochRecord& e : run.epochs) per_epoch[e.epoch].push_back(e.throughput);
  }
  const double ne = ne_sum / static_cast<double>(seeds.size());

  Sink sink(opt.out, out);
  std::ostream& o = *sink;
  csv::row(o, {"epoch", "throughput_mean", "throughput_std", "ne_throughput"});
  for (std::size_t e = 0; e < epochs; ++e) {
    const auto& v = per_epoch[e];
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd =
        v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
    csv::row(o, {str(e), real(mean), real(sd), real(ne)});
  }
  if (!opt.out.empty()) {
    const std::filesystem::path dir(opt.out + ".scenarios");
    if (!generated.empty()) std::filesystem::create_directories(dir);
    for (const auto& [seed, sc] : generated) {
      save_scenario((dir / ("seed" + str(seed) + ".json")).string(), sc, seed);
    }
  }
  return kExitOk;
}

// -- fig3 -------------------------------------------------------------------

struct Fig3Options {
  std::vector<std::size_t> files{3, 4, 5, 6, 7, 8};
  std::size_t group_size = 10;
  double w_lo = 1.0;
  double w_hi = 2.0;
  double g = 1.0;
  std::vector<std::uint64_t> seeds;
  bool simulate = false;
  std::uint64_t rounds = 100000;
  std::string out;
};

int cmd_fig3(const Fig3Options& opt, std::ostream& out) {
  const std::vector<std::uint64_t> seeds =
      opt.seeds.empty() ? std::vector<std::uint64_t>{1} : opt.seeds;

  Sink sink(opt.out, out);
  std::ostream& o = *sink;
  if (opt.simulate) {
    csv::row(o, {"num_files", "coded_throughput", "baseline", "realizable",
                 "simulated_throughput"});
  } else {
    csv::row(o, {"num_files", "coded_throughput", "baseline", "realizable"});
  }

  std::filesystem::path dump_dir;
  if (!opt.out.empty()) {
    dump_dir = opt.out + ".scenarios";
    std::filesystem::create_directories(dump_dir);
  }

  for (std::size_t files : opt.files) {
    double analytic = 0.0;
    double simulated = 0.0;
    std::size_t realizable = 0;
    for (std::uint64_t seed : seeds) {
      const Scenario s = generate_scenario(GeneratorSpec{
          std::vector<std::size_t>(files, opt.group_size), opt.w_lo, opt.w_hi, opt.g, seed});
      if (!dump_dir.empty()) {
        save_scenario((dump_dir / ("files" + str(files) + "_seed" + str(seed) + ".json"))
                          .string(),
                      s, seed);
      }
      analytic += coded_throughput(s);
      std::optional<StrategyProfile> profile;
      try {
        profile = equilibrium_profile(s, /*coded=*/true, kDefaultAlpha);
        ++realizable;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNegativeRate) throw;
      }
      if (opt.simulate && profile) {
        SimConfig cfg{s, *profile, opt.rounds, mix_seed(seed, files), true, 0, {}};
        simulated += run_simulation(cfg).metrics.per_node_throughput();
      }
    }
    const double n = static_cast<double>(seeds.size());
    const double fraction = static_cast<double>(realizable) / n;
    std::string sim_field;
    if (opt.simulate) {
      sim_field = realizable > 0 ? real(simulated / static_cast<double>(realizable)) : "";
    }
    if (opt.simulate) {
      csv::row(o, {str(files), real(analytic / n), real(1.0 / static_cast<double>(files)),
                   real(fraction), sim_field});
    } else {
      csv::row(o, {str(files), real(analytic / n), real(1.0 / static_cast<double>(files)),
                   real(fraction)});
    }
  }
  return kExitOk;
}

void report(const Error& e, std::ostream& err) {
  err << "error: " << e.what() << '\n';
  for (const Violation& v : e.violations()) {
    err << "  - " << to_string(v.code) << ": " << v.message << '\n';
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Broadcast exchange game: equilibria, simulation and adaptation", "wbx"};
  app.require_subcommand(1);

  NeOptions ne;
  auto* ne_cmd = app.add_subcommand("ne", "Closed-form equilibrium rates");
  add_scenario_options(ne_cmd, ne.src);
  ne_cmd->add_option("--alpha", ne.alpha, "Two-file initiation split in [0,1]");
  ne_cmd->add_flag("--coded", ne.coded, "Use the network-coded game");
  ne_cmd->add_flag("--allow-signed", ne.allow_signed,
                   "Print formal rates even when some are negative");
  ne_cmd->add_option("--out", ne.out, "Output CSV (default stdout)");

  PoaOptions poa;
  auto* poa_cmd = app.add_subcommand("poa", "Prices of anarchy for two files");
  add_scenario_options(poa_cmd, poa.src);
  poa_cmd->add_option("--out", poa.out, "Output CSV (default stdout)");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate the equilibrium profile");
  add_scenario_options(sim_cmd, sim.src);
  sim_cmd->add_option("--alpha", sim.alpha, "Two-file initiation split in [0,1]");
  sim_cmd->add_flag("--coded", sim.coded, "Network-coded replies");
  sim_cmd->add_option("--rounds", sim.rounds, "Rounds per seed")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seeds", sim.seeds, "Comma-separated seeds")->delimiter(',');
  sim_cmd->add_option("--trace", sim.trace, "Per-round trace CSV (first seed)");
  sim_cmd->add_option("--out", sim.out, "Metrics CSV (default stdout)");

  AdaptOptions adapt;
  auto* adapt_cmd = app.add_subcommand("adapt", "Simulate the distributed rate updates");
  add_scenario_options(adapt_cmd, adapt.src);
  add_adapt_options(adapt_cmd, adapt.cfg);
  adapt_cmd->add_option("--seeds", adapt.seeds, "Comma-separated seeds")->delimiter(',');
  adapt_cmd->add_option("--node-trace", adapt.node_trace, "Per-node rate CSV");
  adapt_cmd->add_option("--out", adapt.out, "Epoch CSV (default stdout)");

  Fig2Options fig2;
  auto* fig2_cmd = app.add_subcommand("fig2", "Adaptation convergence averaged over seeds");
  add_scenario_options(fig2_cmd, fig2.src);
  add_adapt_options(fig2_cmd, fig2.cfg);
  fig2_cmd->add_option("--seeds", fig2.seeds, "Comma-separated seeds (default 1..20)")
      ->delimiter(',');
  fig2_cmd->add_option("--out", fig2.out, "Output CSV (default stdout)");

  Fig3Options fig3;
  auto* fig3_cmd = app.add_subcommand("fig3", "Coded throughput versus file count");
  fig3_cmd->add_option("--files", fig3.files, "File counts")->delimiter(',');
  fig3_cmd->add_option("--group-size", fig3.group_size, "Nodes needing each file");
  fig3_cmd->add_option("--w-lo", fig3.w_lo, "Waiting cost lower bound");
  fig3_cmd->add_option("--w-hi", fig3.w_hi, "Waiting cost upper bound");
  fig3_cmd->add_option("--g", fig3.g, "Transmission cost");
  fig3_cmd->add_option("--seeds", fig3.seeds, "Comma-separated seeds (default 1)")
      ->delimiter(',');
  fig3_cmd->add_flag("--simulate", fig3.simulate, "Cross-check by simulation");
  fig3_cmd->add_option("--rounds", fig3.rounds, "Simulated rounds per point")
      ->check(CLI::PositiveNumber);
  fig3_cmd->add_option("--out", fig3.out, "Output CSV (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*ne_cmd) return cmd_ne(ne, out);
    if (*poa_cmd) return cmd_poa(poa, out);
    if (*sim_cmd) return cmd_simulate(sim, out);
    if (*adapt_cmd) return cmd_adapt(adapt, out, err);
    if (*fig2_cmd) return cmd_fig2(fig2, out);
    if (*fig3_cmd) return cmd_fig3(fig3, out);
  } catch (const Error& e) {
    report(e, err);
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace wbx::cli
