#include "wbx/adaptation.hpp"

#include <cmath>
#include <sstream>

#include "wbx/simulator.hpp"

namespace wbx {

namespace {

constexpr FileId kResponderFile{0};
constexpr FileId kInitiatorFile{1};

void require_two_file_scenario(const Scenario& s) {
  require_valid(s);
  if (s.file_count() != 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "adaptation is defined for two-file scenarios only");
  }
}

void set_rate(AdaptState& state, const Scenario& s, std::uint32_t n) {
  NodeAdaptState& node = state.nodes[n];
  const double raw = node.inv_guess - s.ratio(NodeId{n});
  if (raw < 0.0) {
    const bool was_positive = node.rate > 0.0 || state.epoch == 0;
    node.rate = 0.0;
    ++state.floor_events;
    if (!was_positive) return;
    std::ostringstream msg;
    msg << "epoch " << state.epoch << ": node " << n << " rate " << raw
        << " floored at 0";
    state.warnings.push_back(msg.str());
  } else {
    node.rate = raw;
  }
}

}  // namespace

void AdaptConfig::validate() const {
  if (epoch_rounds < 1) throw Error(ErrorCode::kInvalidArgument, "M must be >= 1");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be > 0");
  if (!(guess_factor > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "guess factor must be > 0");
  }
}

Side side_of(const Scenario& s, NodeId n) {
  return s.needs(n) == kResponderFile ? Side::kResponder : Side::kInitiator;
}

double AdaptState::total_rate(Side side) const {
  double sum = 0.0;
  for (const NodeAdaptState& n : nodes) {
    if (n.side == side) sum += n.rate;
  }
  return sum;
}

void AdaptState::observe(const RoundOutcome& round) {
  response_sum += round.response_duration;
  initiation_sum += round.initiation_duration;
  ++observed_rounds;
}

PhaseObservation AdaptState::mean_observation() const {
  if (observed_rounds == 0) {
    throw Error(ErrorCode::kNonpositiveObservation, "no rounds observed since last update");
  }
  const double count = static_cast<double>(observed_rounds);
  return {response_sum / count, initiation_sum / count};
}

StrategyProfile AdaptState::profile(const Scenario& s) const {
  StrategyProfile p(s);
  for (std::uint32_t n = 0; n < nodes.size(); ++n) {
    const NodeId id{n};
    if (nodes[n].side == Side::kResponder) {
      p.set_lambda(id, kInitiatorFile, nodes[n].rate);
    } else {
      p.set_gamma(id, nodes[n].rate);
    }
  }
  return p;
}

AdaptState init_state(const Scenario& s, const AdaptConfig& cfg) {
  require_two_file_scenario(s);
  cfg.validate();
  const GroupSums sums = group_ratio_sums(s);
  AdaptState state;
  state.nodes.resize(s.node_count());
  for (std::uint32_t n = 0; n < s.node_count(); ++n) {
    const NodeId id{n};
    const double assumed =
        cfg.guess_factor * static_cast<double>(sums.per_file[s.needs(id).value].size);
    if (!(assumed > 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "assumed group size must exceed 1");
    }
    NodeAdaptState& node = state.nodes[n];
    node.side = side_of(s, id);
    node.inv_guess = assumed * s.ratio(id) / (assumed - 1.0);
    set_rate(state, s, n);
  }
  return state;
}

double update_inverse_guess(double inv_guess, double observed_mean, double delta) {
  if (!(observed_mean > 0.0)) {
    throw Error(ErrorCode::kNonpositiveObservation, "observed mean backoff must be > 0");
  }
  return (1.0 + delta) * inv_guess - delta / observed_mean;
}

AdaptState observe_and_update(AdaptState state, const Scenario& s,
                              const PhaseObservation& observed, std::size_t k,
                              const AdaptConfig& cfg) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "update index k must be >= 1");
  if (state.nodes.size() != s.node_count()) {
    throw Error(ErrorCode::kInvalidArgument, "state does not match scenario");
  }
  const double delta = cfg.delta(k);
  state.epoch = k;
  for (std::uint32_t n = 0; n < state.nodes.size(); ++n) {
    NodeAdaptState& node = state.nodes[n];
    const double mean = node.side == Side::kResponder ? observed.response_mean
                                                      : observed.initiation_mean;
    node.inv_guess = update_inverse_guess(node.inv_guess, mean, delta);
    set_rate(state, s, n);
  }
  state.response_sum = 0.0;
  state.initiation_sum = 0.0;
  state.observed_rounds = 0;
  return state;
}

std::vector<AnalyticStep> analytic_iterate(const Scenario& s, const AdaptConfig& cfg) {
  AdaptState state = init_state(s, cfg);
  std::vector<AnalyticStep> out;
  out.reserve(cfg.updates + 1);
  out.push_back({0, state.total_rate(Side::kResponder), state.total_rate(Side::kInitiator)});
  for (std::size_t k = 1; k <= cfg.updates; ++k) {
    // A side with zero total rate has an infinite mean phase.
    const PhaseObservation exact{1.0 / out.back().inv_That_A, 1.0 / out.back().inv_That_B};
    state = observe_and_update(std::move(state), s, exact, k, cfg);
    out.push_back({k, state.total_rate(Side::kResponder), state.total_rate(Side::kInitiator)});
  }
  return out;
}

std::vector<double> aggregate_recursion(double x0, double target,
                                        std::size_t group_size,
                                        const AdaptConfig& cfg) {
  std::vector<double> out{x0};
  const double spread = static_cast<double>(group_size) - 1.0;
  for (std::size_t k = 1; k <= cfg.updates; ++k) {
    const double prev = out.back();
    out.push_back(prev + cfg.delta(k) * spread * (target - prev));
  }
  return out;
}

AdaptRun run_adaptive_simulation(const Scenario& s, const AdaptConfig& cfg,
                                 std::uint64_t seed) {
  return run_adaptive_simulation(s, cfg, seed, init_state(s, cfg));
}

AdaptRun run_adaptive_simulation(const Scenario& s, const AdaptConfig& cfg,
                                 std::uint64_t seed, AdaptState initial) {
  require_two_file_scenario(s);
  cfg.validate();
  AdaptRun run;
  AdaptState state = std::move(initial);
  Rng rng(seed);

  for (std::size_t epoch = 0; epoch <= cfg.updates; ++epoch) {
    for (std::uint32_t n = 0; n < state.nodes.size(); ++n) {
      const NodeAdaptState& node = state.nodes[n];
      run.nodes.push_back({epoch, NodeId{n}, 1.0 / node.inv_guess, node.rate});
    }
    if (state.total_rate(Side::kResponder) <= 0.0 ||
        state.total_rate(Side::kInitiator) <= 0.0) {
      throw Error(ErrorCode::kStall,
                  "every rate on one side reached zero at epoch " + std::to_string(epoch));
    }

    const StrategyProfile profile = state.profile(s);
    Metrics metrics(s);
    for (std::size_t r = 0; r < cfg.epoch_rounds; ++r) {
      const RoundOutcome round = run_round(s, profile, /*coded=*/false, rng);
      metrics.record(round);
      state.observe(round);
    }
    const PhaseObservation obs = state.mean_observation();
    run.epochs.push_back({epoch,
                          epoch == 0 ? 0.0 : cfg.delta(epoch),
                          1.0 / obs.response_mean,
                          1.0 / obs.initiation_mean,
                          metrics.per_node_throughput(),
                          metrics.elapsed() / static_cast<double>(metrics.rounds())});
    if (epoch < cfg.updates) {
      state = observe_and_update(std::move(state), s, obs, epoch + 1, cfg);
    }
  }
  run.final_state = std::move(state);
  return run;
}

}  // namespace wbx
