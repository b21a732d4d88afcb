// Closed-form exponential-timer Nash equilibria for the exchange game,
// the expected-cost functionals whose flatness in the node's own timer
// certifies them, and the throughput / price-of-anarchy figures derived
// from them.
//
// Two-file scenarios: group A needs file 0, group B needs file 1.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wbx/linsolve.hpp"
#include "wbx/model.hpp"

namespace wbx {

/// Whether negative rates from the closed forms are rejected or returned.
/// Signed results are the formal solutions of the indifference equations;
/// they are not playable strategies when any rate is negative.
enum class RatePolicy { kRequireNonnegative, kAllowSigned };

inline constexpr double kDefaultAlpha = 0.5;

/// lambda_i = (sum_k r_k)/(count-1) - r_i, so that for every i the other
/// responders' rates sum to r_i.
std::vector<double> response_equilibrium(
    std::span<const double> ratios,
    RatePolicy policy = RatePolicy::kRequireNonnegative);

/// (count-1) / sum(r): mean length of the response phase at equilibrium.
double response_phase_mean(std::span<const double> ratios);

/// Expected additional cost of a responder holding its timer at t while the
/// others' minimum is exponential with rate lambda_other.
double expected_response_cost(double t, double w, double g, double lambda_other);

/// Same cost averaged over the node's own exponential timer with rate
/// lambda_self: w/L + (g - w/L) * lambda_self / (lambda_self + L).
double expected_response_cost_own_rate(double lambda_self, double w, double g,
                                       double lambda_other);

/// Expected total cost per round of a two-file node whose initiation timer is
/// held at t, all other timers following `profile`. Includes the 2w
/// transmission-delay term. Throws kDegenerate when the other nodes' total
/// initiation rate is zero or the opposing group never responds.
double expected_initiation_cost(double t, NodeId node,
                                const StrategyProfile& profile,
                                const Scenario& s);

/// Coefficient of exp(-gamma_minus * t) in expected_initiation_cost; zero
/// exactly when the node is indifferent to its own timer.
double initiation_cost_decay_coefficient(NodeId node,
                                         const StrategyProfile& profile,
                                         const Scenario& s);

struct TwoFileEquilibrium {
  double alpha = kDefaultAlpha;
  StrategyProfile profile;
  double That_A = 0.0;  // mean response phase when group B initiates
  double That_B = 0.0;  // mean response phase when group A initiates
};

/// gamma_a = alpha (sum r_a/(I-1) - r_a), gamma_b = (1-alpha)(...), and
/// per-group response rates. alpha in {0, 1} gives the one-sided profiles
/// used by the adaptive mechanism.
TwoFileEquilibrium two_file_equilibrium(
    const Scenario& s, double alpha = kDefaultAlpha,
    RatePolicy policy = RatePolicy::kRequireNonnegative);

struct RoundDuration {
  double T_init = 0.0;  // 1 / total initiation rate at the chosen alpha
  double That_A = 0.0;
  double That_B = 0.0;
  double total = 0.0;   // That_A + That_B + 2, alpha-independent
};

RoundDuration ne_round_duration(const Scenario& s, double alpha = kDefaultAlpha);

/// Expected round length assembled phase by phase at the given alpha:
/// T_init + P(A initiates) That_B + P(B initiates) That_A + 2.
double ne_round_duration_by_phase(const Scenario& s, double alpha);

double throughput_at_ne(const Scenario& s);

struct NodeCost {
  double cost = 0.0;                  // average total cost per downloaded packet
  double transmit_probability = 0.0;  // chance the node uploads in a round
};

NodeCost node_cost_at_ne(NodeId node, const Scenario& s);

/// Price of anarchy on system throughput: (That_A + That_B + 2) / 2.
double poa_system(const Scenario& s);
/// Node cost at equilibrium over the 2w floor; an upper bound on the node's
/// price of anarchy.
double poa_node(NodeId node, const Scenario& s);

// -- network-coded game, any number of files --------------------------------

/// Row X: c_X Gamma_X + d_X sum_{Y != X} Gamma_Y = 1.
struct CodedSystem {
  linsolve::DenseSystem system{1};
  std::vector<double> c;  // (I_X - 1) / sum of own-group ratios
  std::vector<double> d;  // (I_notX - 1) / sum of complement ratios
};

CodedSystem build_coded_system(const Scenario& s);

struct CodedFamily {
  std::vector<double> particular;
  std::vector<std::vector<double>> null_basis;
};

struct CodedEquilibrium {
  std::vector<double> Gamma;            // empty when degenerate
  std::optional<StrategyProfile> profile;  // empty when degenerate
  bool degenerate = false;
  std::optional<CodedFamily> family;   // set when degenerate
  std::vector<double> c;
  std::vector<double> d;
};

/// Solves the aggregate system and recovers per-node rates. Two-file
/// scenarios give a rank-1 family (degenerate); rank deficiency with three or
/// more files throws kSingularUnexpected.
CodedEquilibrium coded_equilibrium(
    const Scenario& s, RatePolicy policy = RatePolicy::kRequireNonnegative);

/// gamma_n = Gamma_{X_n} - r_n (1 - d_{X_n} sum_{Y != X_n} Gamma_Y), plus
/// lambda_{m|X} from response_equilibrium over each file's holders.
StrategyProfile coded_profile(const Scenario& s, const CodedSystem& sys,
                              std::span<const double> Gamma,
                              RatePolicy policy = RatePolicy::kRequireNonnegative);

/// Point on the two-file family: Gamma_A = alpha / That_A,
/// Gamma_B = (1 - alpha) / That_B.
std::vector<double> two_file_family_point(const CodedSystem& sys, double alpha);

struct CodedRoundDuration {
  double T_init = 0.0;
  double response_mean = 0.0;  // sum_X (Gamma_X / sum Gamma) d_X
  double total = 0.0;
};

CodedRoundDuration coded_round_duration(const CodedSystem& sys,
                                        std::span<const double> Gamma);

/// Per-node throughput of the coded equilibrium (every node downloads once
/// per round). Requires a unique solution.
double coded_throughput(const Scenario& s);

struct CodedResiduals {
  double system_row = 0.0;   // max |row(Gamma) - 1|
  double node_identity = 0.0;  // max |(Gamma_X - gamma_n)/(1 - d sum) - r_n|
  double gamma_sum = 0.0;    // max |Gamma_X - sum_{n in X} gamma_n|
  double response = 0.0;     // max |sum_{k != m} lambda_{k|X} - r_m|
};

CodedResiduals coded_residuals(const Scenario& s, const CodedSystem& sys,
                               std::span<const double> Gamma,
                               const StrategyProfile& profile);

}  // namespace wbx
