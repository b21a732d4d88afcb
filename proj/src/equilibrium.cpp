#include "wbx/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wbx {

namespace {

// Rates within this relative distance below zero are rounding noise of an
// exact zero and are snapped to 0.
constexpr double kZeroSnap = 1e-12;

double checked_rate(double value, double scale, RatePolicy policy,
                    const char* what, std::size_t index) {
  if (value >= 0.0 || policy == RatePolicy::kAllowSigned) return value;
  if (value >= -kZeroSnap * std::max(scale, 1.0)) return 0.0;
  std::ostringstream msg;
  msg << what << " " << index << " would be " << value
      << "; no exponential-timer equilibrium with nonnegative rates exists";
  throw Error(ErrorCode::kNegativeRate, msg.str());
}

void require_two_files(const Scenario& s) {
  require_valid(s);
  if (s.file_count() != 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "operation is defined for two-file scenarios; got " +
                    std::to_string(s.file_count()) + " files");
  }
}

std::vector<double> ratios_of(const Scenario& s, const std::vector<NodeId>& ids) {
  std::vector<double> out;
  out.reserve(ids.size());
  for (NodeId n : ids) out.push_back(s.ratio(n));
  return out;
}

FileId other_file(FileId x) { return FileId{x.value == 0 ? 1u : 0u}; }

}  // namespace

std::vector<double> response_equilibrium(std::span<const double> ratios,
                                         RatePolicy policy) {
  if (ratios.size() < 2) {
    throw Error(ErrorCode::kGroupTooSmall,
                "response equilibrium needs at least two eligible responders");
  }
  double sum = 0.0;
  for (double r : ratios) sum += r;
  const double level = sum / static_cast<double>(ratios.size() - 1);
  std::vector<double> out;
  out.reserve(ratios.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    out.push_back(checked_rate(level - ratios[i], level, policy,
                               "response rate of responder", i));
  }
  return out;
}

double response_phase_mean(std::span<const double> ratios) {
  if (ratios.size() < 2) {
    throw Error(ErrorCode::kGroupTooSmall, "need at least two responders");
  }
  double sum = 0.0;
  for (double r : ratios) sum += r;
  if (!(sum > 0.0)) throw Error(ErrorCode::kInvalidArgument, "ratio sum must be positive");
  return static_cast<double>(ratios.size() - 1) / sum;
}

double expected_response_cost(double t, double w, double g, double lambda_other) {
  if (!(lambda_other > 0.0) || t < 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected_response_cost needs lambda_other > 0 and t >= 0");
  }
  const double free_ride = w / lambda_other;
  return free_ride + std::exp(-lambda_other * t) * (g - free_ride);
}

double expected_response_cost_own_rate(double lambda_self, double w, double g,
                                       double lambda_other) {
  if (!(lambda_other > 0.0) || lambda_self < 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "need lambda_other > 0 and lambda_self >= 0");
  }
  const double free_ride = w / lambda_other;
  return free_ride + (g - free_ride) * lambda_self / (lambda_self + lambda_other);
}

namespace {

struct InitiationTerms {
  double gamma_minus;   // everyone else's initiation rate
  double same_others;   // own group minus the node
  double other_group;   // opposing group
  double That_other;    // response phase after the node initiates
  double w;
  double g;
};

InitiationTerms initiation_terms(NodeId node, const StrategyProfile& profile,
                                 const Scenario& s) {
  require_two_files(s);
  const FileId own = s.needs(node);
  InitiationTerms t{};
  for (std::uint32_t m = 0; m < s.node_count(); ++m) {
    if (m == node.value) continue;
    const double gm = profile.gamma(NodeId{m});
    if (s.needs(NodeId{m}) == own) {
      t.same_others += gm;
    } else {
      t.other_group += gm;
    }
  }
  t.gamma_minus = t.same_others + t.other_group;
  if (!(t.gamma_minus > 0.0)) {
    throw Error(ErrorCode::kDegenerate,
                "other nodes never initiate; initiation cost is undefined");
  }
  const double responders = profile.total_lambda(own);
  if (!(responders > 0.0)) {
    throw Error(ErrorCode::kDegenerate, "no node ever responds to this node");
  }
  t.That_other = 1.0 / responders;
  t.w = s.cost(node).w;
  t.g = s.cost(node).g;
  return t;
}

}  // namespace

double expected_initiation_cost(double t, NodeId node,
                                const StrategyProfile& profile,
                                const Scenario& s) {
  if (t < 0.0) throw Error(ErrorCode::kInvalidArgument, "t must be >= 0");
  const InitiationTerms v = initiation_terms(node, profile, s);
  const double p_same = v.same_others / v.gamma_minus;
  const double p_other = v.other_group / v.gamma_minus;
  const double steady = v.w / v.gamma_minus + p_same * v.w * v.That_other +
                        p_other * v.g + 2.0 * v.w;
  const double coeff =
      p_other * v.w * v.That_other + p_same * v.g - v.w / v.gamma_minus;
  return steady + std::exp(-v.gamma_minus * t) * coeff;
}

double initiation_cost_decay_coefficient(NodeId node,
                                         const StrategyProfile& profile,
                                         const Scenario& s) {
  const InitiationTerms v = initiation_terms(node, profile, s);
  return (v.other_group * v.w * v.That_other + v.same_others * v.g - v.w) /
         v.gamma_minus;
}

TwoFileEquilibrium two_file_equilibrium(const Scenario& s, double alpha,
                                        RatePolicy policy) {
  require_two_files(s);
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in [0, 1]");
  }
  TwoFileEquilibrium eq{alpha, StrategyProfile(s), 0.0, 0.0};
  for (std::uint32_t x = 0; x < 2; ++x) {
    const FileId file{x};
    const auto members = s.group(file);
    const auto ratios = ratios_of(s, members);
    const double share = x == 0 ? alpha : 1.0 - alpha;
    const auto lambda = response_equilibrium(ratios, policy);
    // gamma is the response rate scaled by this group's share of alpha.
    for (std::size_t i = 0; i < members.size(); ++i) {
      eq.profile.set_lambda(members[i], other_file(file), lambda[i]);
      eq.profile.set_gamma(members[i], share * lambda[i]);
    }
    const double That = response_phase_mean(ratios);
    (x == 0 ? eq.That_A : eq.That_B) = That;
  }
  return eq;
}

RoundDuration ne_round_duration(const Scenario& s, double alpha) {
  require_two_files(s);
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in [0, 1]");
  }
  const GroupSums sums = group_ratio_sums(s);
  RoundDuration out;
  out.That_A = static_cast<double>(sums.per_file[0].size - 1) / sums.per_file[0].ratio_sum;
  out.That_B = static_cast<double>(sums.per_file[1].size - 1) / sums.per_file[1].ratio_sum;
  out.T_init = 1.0 / (alpha / out.That_A + (1.0 - alpha) / out.That_B);
  out.total = out.That_A + out.That_B + 2.0;
  return out;
}

double ne_round_duration_by_phase(const Scenario& s, double alpha) {
  const RoundDuration d = ne_round_duration(s, alpha);
  const double rate_a = alpha / d.That_A;
  const double rate_b = (1.0 - alpha) / d.That_B;
  const double total = rate_a + rate_b;
  // Group A initiating is answered by group B, and vice versa.
  return 1.0 / total + (rate_a / total) * d.That_B + (rate_b / total) * d.That_A +
         2.0;
}

double throughput_at_ne(const Scenario& s) {
  return 1.0 / ne_round_duration(s).total;
}

NodeCost node_cost_at_ne(NodeId node, const Scenario& s) {
  const RoundDuration d = ne_round_duration(s);
  const bool in_a = s.needs(node).value == 0;
  const double That_own = in_a ? d.That_A : d.That_B;
  const double That_other = in_a ? d.That_B : d.That_A;
  const CostParams& c = s.cost(node);
  return NodeCost{c.g + c.w * That_other + 2.0 * c.w,
                  1.0 - c.ratio() * That_own};
}

double poa_system(const Scenario& s) { return ne_round_duration(s).total / 2.0; }

double poa_node(NodeId node, const Scenario& s) {
  return node_cost_at_ne(node, s).cost / (2.0 * s.cost(node).w);
}

CodedSystem build_coded_system(const Scenario& s) {
  require_valid(s);
  const std::size_t files = s.file_count();
  const GroupSums sums = group_ratio_sums(s);
  CodedSystem out{linsolve::DenseSystem(files), {}, {}};
  out.c.resize(files);
  out.d.resize(files);
  for (std::uint32_t x = 0; x < files; ++x) {
    const GroupStats own = sums.per_file[x];
    const GroupStats rest = sums.complement(FileId{x});
    out.c[x] = static_cast<double>(own.size - 1) / own.ratio_sum;
    out.d[x] = static_cast<double>(rest.size - 1) / rest.ratio_sum;
    for (std::size_t y = 0; y < files; ++y) {
      out.system.a(x, y) = (y == x) ? out.c[x] : out.d[x];
    }
    out.system.b(x) = 1.0;
  }
  return out;
}

StrategyProfile coded_profile(const Scenario& s, const CodedSystem& sys,
                              std::span<const double> Gamma, RatePolicy policy) {
  const std::size_t files = s.file_count();
  if (Gamma.size() != files) {
    throw Error(ErrorCode::kInvalidArgument, "Gamma has wrong length");
  }
  double total_gamma = 0.0;
  double scale = 0.0;
  for (double G : Gamma) {
    total_gamma += G;
    scale = std::max(scale, std::abs(G));
  }

  StrategyProfile profile(s);
  for (std::uint32_t n = 0; n < s.node_count(); ++n) {
    const std::uint32_t x = s.needs(NodeId{n}).value;
    const double others = total_gamma - Gamma[x];
    const double rate = Gamma[x] - s.ratio(NodeId{n}) * (1.0 - sys.d[x] * others);
    profile.set_gamma(NodeId{n}, checked_rate(rate, scale, policy, "initiation rate of node", n));
  }
  for (std::uint32_t x = 0; x < files; ++x) {
    const auto holders = s.holders(FileId{x});
    const auto lambda = response_equilibrium(ratios_of(s, holders), policy);
    for (std::size_t i = 0; i < holders.size(); ++i) {
      profile.set_lambda(holders[i], FileId{x}, lambda[i]);
    }
  }
  return profile;
}

CodedEquilibrium coded_equilibrium(const Scenario& s, RatePolicy policy) {
  CodedSystem sys = build_coded_system(s);
  CodedEquilibrium out;
  out.c = sys.c;
  out.d = sys.d;
  auto solution = linsolve::solve(sys.system);
  if (auto* u = std::get_if<linsolve::Unique>(&solution)) {
    out.Gamma = u->x;
    out.profile = coded_profile(s, sys, out.Gamma, policy);
    return out;
  }
  if (auto* f = std::get_if<linsolve::Family>(&solution); f && s.file_count() == 2) {
    out.degenerate = true;
    out.family = CodedFamily{f->particular, f->null_basis};
    return out;
  }
  throw Error(ErrorCode::kSingularUnexpected,
              std::holds_alternative<linsolve::Inconsistent>(solution)
                  ? "aggregate initiation system is inconsistent"
                  : "aggregate initiation system is rank deficient with " +
                        std::to_string(s.file_count()) + " files");
}

std::vector<double> two_file_family_point(const CodedSystem& sys, double alpha) {
  if (sys.c.size() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "family point needs a two-file system");
  }
  // Row A reads That_A Gamma_A + That_B Gamma_B = 1 with c_A = That_A, d_A = That_B.
  return {alpha / sys.c[0], (1.0 - alpha) / sys.d[0]};
}

CodedRoundDuration coded_round_duration(const CodedSystem& sys,
                                        std::span<const double> Gamma) {
  if (Gamma.size() != sys.c.size()) {
    throw Error(ErrorCode::kInvalidArgument, "Gamma has wrong length");
  }
  double total = 0.0;
  double weighted = 0.0;
  for (std::size_t x = 0; x < Gamma.size(); ++x) {
    total += Gamma[x];
    weighted += Gamma[x] * sys.d[x];
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kDegenerate, "total initiation rate is not positive");
  }
  CodedRoundDuration out;
  out.T_init = 1.0 / total;
  out.response_mean = weighted / total;
  out.total = out.T_init + out.response_mean + 2.0;
  return out;
}

double coded_throughput(const Scenario& s) {
  const CodedSystem sys = build_coded_system(s);
  auto solution = linsolve::solve(sys.system);
  if (auto* u = std::get_if<linsolve::Unique>(&solution)) {
    return 1.0 / coded_round_duration(sys, u->x).total;
  }
  if (s.file_count() == 2 && std::holds_alternative<linsolve::Family>(solution)) {
    return 1.0 / coded_round_duration(sys, two_file_family_point(sys, kDefaultAlpha)).total;
  }
  throw Error(ErrorCode::kSingularUnexpected, "aggregate initiation system has no unique solution");
}

CodedResiduals coded_residuals(const Scenario& s, const CodedSystem& sys,
                               std::span<const double> Gamma,
                               const StrategyProfile& profile) {
  const std::size_t files = s.file_count();
  CodedResiduals out;
  double total = 0.0;
  for (double G : Gamma) total += G;

  for (std::size_t x = 0; x < files; ++x) {
    const double row = sys.c[x] * Gamma[x] + sys.d[x] * (total - Gamma[x]);
    out.system_row = std::max(out.system_row, std::abs(row - 1.0));
  }

  std::vector<double> group_sum(files, 0.0);
  for (std::uint32_t n = 0; n < s.node_count(); ++n) {
    const std::uint32_t x = s.needs(NodeId{n}).value;
    const double gamma = profile.gamma(NodeId{n});
    group_sum[x] += gamma;
    const double denom = 1.0 - (total - Gamma[x]) * sys.d[x];
    out.node_identity = std::max(
        out.node_identity, std::abs((Gamma[x] - gamma) / denom - s.ratio(NodeId{n})));
  }
  for (std::size_t x = 0; x < files; ++x) {
    out.gamma_sum = std::max(out.gamma_sum, std::abs(Gamma[x] - group_sum[x]));
  }

  for (std::uint32_t x = 0; x < files; ++x) {
    const double all = profile.total_lambda(FileId{x});
    for (NodeId m : s.holders(FileId{x})) {
      const double others = all - *profile.lambda(m, FileId{x});
      out.response = std::max(out.response, std::abs(others - s.ratio(m)));
    }
  }
  return out;
}

}  // namespace wbx
