// Seeded round-by-round simulation of the exchange protocol.
//
// Random stream: std::mt19937_64 seeded with the 64-bit seed. A uniform in
// (0,1) is ((x >> 11) + 0.5) * 2^-53 for each 64-bit output x, so it is never
// 0 or 1. Each round draws one uniform per node with a positive initiation
// rate (in node order), then one per eligible responder with a positive
// response rate (in node order). Zero-rate timers consume no draws.

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "wbx/model.hpp"

namespace wbx {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on the open interval (0, 1).
  double uniform_open01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; derives independent sub-seeds from one seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Timer value of a zero-rate node. Larger than every finite time.
inline constexpr double kNever = std::numeric_limits<double>::infinity();

inline bool is_never(double t) { return t == kNever; }

/// -ln(u) / rate, or kNever when rate == 0. Throws kNegativeRate on rate < 0.
double exponential_from_uniform(double rate, double u);

double sample_exponential(double rate, Rng& rng);

/// One protocol round. Ties between timers go to the lowest node index.
/// Throws kStall when nobody can initiate or nobody can answer.
RoundOutcome run_round(const Scenario& s, const StrategyProfile& profile,
                       bool coded, Rng& rng);

struct RoundRecord {
  std::uint64_t round = 0;
  NodeId initiator;
  NodeId responder;
  double t_init = 0.0;
  double t_resp = 0.0;
  double duration = 0.0;
};

inline constexpr std::size_t kFullTrace = std::numeric_limits<std::size_t>::max();

struct SimConfig {
  Scenario scenario;
  StrategyProfile profile;
  std::uint64_t rounds = 1;
  std::uint64_t seed = 0;
  bool coded = false;
  /// Number of most recent rounds kept in the trace; 0 keeps none and
  /// kFullTrace keeps all.
  std::size_t trace_capacity = 0;
  /// Optional hook called after every round (e.g. for streaming traces).
  std::function<void(const RoundRecord&)> on_round = {};
};

struct SimResult {
  Metrics metrics;
  std::deque<RoundRecord> trace;
};

SimResult run_simulation(const SimConfig& cfg);

}  // namespace wbx
