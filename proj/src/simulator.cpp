#include "wbx/simulator.hpp"

#include <cmath>

namespace wbx {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double exponential_from_uniform(double rate, double u) {
  if (rate < 0.0 || std::isnan(rate)) {
    throw Error(ErrorCode::kNegativeRate, "exponential timer with negative rate");
  }
  if (rate == 0.0) return kNever;
  return -std::log(u) / rate;
}

double sample_exponential(double rate, Rng& rng) {
  if (rate < 0.0 || std::isnan(rate)) {
    throw Error(ErrorCode::kNegativeRate, "exponential timer with negative rate");
  }
  if (rate == 0.0) return kNever;
  return exponential_from_uniform(rate, rng.uniform_open01());
}

RoundOutcome run_round(const Scenario& s, const StrategyProfile& profile,
                       bool coded, Rng& rng) {
  const std::size_t count = s.node_count();
  RoundOutcome out;

  double best = kNever;
  bool found = false;
  for (std::uint32_t n = 0; n < count; ++n) {
    const double t = sample_exponential(profile.gamma(NodeId{n}), rng);
    if (t < best) {
      best = t;
      out.initiator = NodeId{n};
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::kStall, "no node can initiate");
  out.initiation_duration = best;

  const FileId wanted = s.needs(out.initiator);
  best = kNever;
  found = false;
  for (std::uint32_t m = 0; m < count; ++m) {
    const NodeId node{m};
    if (!s.possesses(node, wanted)) continue;
    const double t = sample_exponential(*profile.lambda(node, wanted), rng);
    if (t < best) {
      best = t;
      out.responder = node;
      found = true;
    }
  }
  if (!found) {
    throw Error(ErrorCode::kStall,
                "no holder of file " + std::to_string(wanted.value) + " responds");
  }
  out.response_duration = best;
  out.total_duration = out.initiation_duration + out.response_duration + 2.0;

  out.uploads.assign(count, 0);
  out.uploads[out.responder.value] = 1;
  out.uploads[out.initiator.value] = 1;

  out.downloads.assign(count, 0);
  const FileId reply = s.needs(out.responder);
  for (std::uint32_t n = 0; n < count; ++n) {
    const FileId x = s.needs(NodeId{n});
    // Plain reply carries the responder's file; the coded reply carries one
    // packet of every file except `wanted`.
    const bool served = x == wanted || (coded ? true : x == reply);
    out.downloads[n] = served ? 1 : 0;
  }
  return out;
}

SimResult run_simulation(const SimConfig& cfg) {
  if (cfg.rounds < 1) throw Error(ErrorCode::kInvalidArgument, "rounds must be >= 1");
  require_valid(cfg.scenario);
  if (cfg.profile.node_count() != cfg.scenario.node_count() ||
      cfg.profile.file_count() != cfg.scenario.file_count()) {
    throw Error(ErrorCode::kInvalidArgument, "profile does not match scenario");
  }

  SimResult result{Metrics(cfg.scenario), {}};
  Rng rng(cfg.seed);
  for (std::uint64_t r = 0; r < cfg.rounds; ++r) {
    const RoundOutcome round = run_round(cfg.scenario, cfg.profile, cfg.coded, rng);
    result.metrics.record(round);
    if (cfg.trace_capacity == 0 && !cfg.on_round) continue;
    const RoundRecord rec{r,
                          round.initiator,
                          round.responder,
                          round.initiation_duration,
                          round.response_duration,
                          round.total_duration};
    if (cfg.on_round) cfg.on_round(rec);
    if (cfg.trace_capacity > 0) {
      if (result.trace.size() == cfg.trace_capacity) result.trace.pop_front();
      result.trace.push_back(rec);
    }
  }
  return result;
}

}  // namespace wbx
