// Distributed rate adaptation for two-file scenarios.
//
// Roles are fixed by file order: nodes needing file 0 only respond, nodes
// needing file 1 only initiate. Every node keeps a guess T of the mean
// backoff in the phase it plays, uses rate 1/T - w/g, and every M rounds
// moves its inverse guess by
//
//   1/T_k = (1 + delta_k) / T_{k-1} - delta_k / observed_mean,
//
// with delta_k = epsilon / k.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wbx/model.hpp"

namespace wbx {

struct AdaptConfig {
  std::size_t epoch_rounds = 100;  // M
  double epsilon = 0.1;
  double guess_factor = 10.0;      // assumed group size / true group size
  std::size_t updates = 10;

  double delta(std::size_t k) const { return epsilon / static_cast<double>(k); }
  void validate() const;
};

enum class Side { kResponder, kInitiator };

struct NodeAdaptState {
  Side side = Side::kResponder;
  double inv_guess = 0.0;  // 1 / T_{n,k}
  double rate = 0.0;       // max(0, inv_guess - w/g)
};

struct PhaseObservation {
  double response_mean = 0.0;    // mean winning response backoff
  double initiation_mean = 0.0;  // mean winning initiation backoff
};

struct AdaptState {
  std::vector<NodeAdaptState> nodes;
  std::size_t epoch = 0;          // number of updates applied
  std::size_t floor_events = 0;   // updates that clamped a rate to zero
  std::vector<std::string> warnings;

  // Accumulated winning backoffs since the last update.
  double response_sum = 0.0;
  double initiation_sum = 0.0;
  std::size_t observed_rounds = 0;

  /// Sum of rates on one side (the inverse of that phase's mean length).
  double total_rate(Side side) const;
  void observe(const RoundOutcome& round);
  PhaseObservation mean_observation() const;

  /// One-sided strategy profile: responders answer file-1 requests,
  /// initiators never respond.
  StrategyProfile profile(const Scenario& s) const;
};

Side side_of(const Scenario& s, NodeId n);

/// T_{n,0} = (G-1)/(G r_n) with G = guess_factor * true group size.
AdaptState init_state(const Scenario& s, const AdaptConfig& cfg);

/// (1 + delta) * inv_guess - delta / observed_mean.
double update_inverse_guess(double inv_guess, double observed_mean, double delta);

/// Applies update k (k >= 1) to every node; clears the accumulators.
AdaptState observe_and_update(AdaptState state, const Scenario& s,
                              const PhaseObservation& observed, std::size_t k,
                              const AdaptConfig& cfg);

struct AnalyticStep {
  std::size_t k = 0;
  double inv_That_A = 0.0;  // responder side total rate
  double inv_That_B = 0.0;  // initiator side total rate
};

/// Runs cfg.updates updates feeding each node the exact expected phase
/// means 1 / total rate. Returns k = 0..updates.
std::vector<AnalyticStep> analytic_iterate(const Scenario& s, const AdaptConfig& cfg);

/// Aggregate recursion on the inverse mean of one side:
/// x_k = x_{k-1} + delta_k (I - 1) (target - x_{k-1}).
std::vector<double> aggregate_recursion(double x0, double target,
                                        std::size_t group_size,
                                        const AdaptConfig& cfg);

struct EpochRecord {
  std::size_t epoch = 0;
  double delta = 0.0;  // step that produced this epoch's rates; 0 for epoch 0
  double observed_inv_That_A = 0.0;
  double observed_inv_That_B = 0.0;
  double throughput = 0.0;
  double mean_duration = 0.0;
};

struct NodeEpochRecord {
  std::size_t epoch = 0;
  NodeId node;
  double That = 0.0;
  double rate = 0.0;
};

struct AdaptRun {
  std::vector<EpochRecord> epochs;
  std::vector<NodeEpochRecord> nodes;
  AdaptState final_state;
};

/// Simulates updates + 1 epochs of M rounds. Epoch e runs with the rates
/// after e updates; its observations drive update e + 1.
AdaptRun run_adaptive_simulation(const Scenario& s, const AdaptConfig& cfg,
                                 std::uint64_t seed);

/// Same loop starting from a caller-supplied state.
AdaptRun run_adaptive_simulation(const Scenario& s, const AdaptConfig& cfg,
                                 std::uint64_t seed, AdaptState initial);

}  // namespace wbx
