#include "wbx/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace wbx {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kGroupTooSmall: return "GROUP_TOO_SMALL";
    case ErrorCode::kNonpositiveCost: return "NONPOSITIVE_COST";
    case ErrorCode::kTooFewFiles: return "TOO_FEW_FILES";
    case ErrorCode::kUnknownFile: return "UNKNOWN_FILE";
    case ErrorCode::kNegativeRate: return "NEGATIVE_RATE";
    case ErrorCode::kSingularUnexpected: return "SINGULAR_UNEXPECTED";
    case ErrorCode::kDegenerate: return "DEGENERATE";
    case ErrorCode::kStall: return "STALL";
    case ErrorCode::kNonpositiveObservation: return "NONPOSITIVE_OBSERVATION";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kConfig: return "CONFIG";
  }
  return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message,
             std::vector<Violation> violations)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      violations_(std::move(violations)) {}

Scenario::Scenario(std::size_t file_count, std::vector<NodeSpec> nodes)
    : file_count_(file_count), nodes_(std::move(nodes)) {}

std::vector<NodeId> Scenario::group(FileId x) const {
  std::vector<NodeId> out;
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].needs == x) out.push_back(NodeId{i});
  }
  return out;
}

std::vector<NodeId> Scenario::holders(FileId x) const {
  std::vector<NodeId> out;
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].needs != x) out.push_back(NodeId{i});
  }
  return out;
}

std::vector<Violation> validate_scenario(const Scenario& s) {
  std::vector<Violation> out;
  if (s.file_count() < 2) {
    out.push_back({ErrorCode::kTooFewFiles,
                   "scenario has " + std::to_string(s.file_count()) +
                       " file(s); at least 2 required"});
  }
  std::vector<std::size_t> sizes(s.file_count(), 0);
  for (std::size_t i = 0; i < s.node_count(); ++i) {
    const NodeSpec& n = s.nodes()[i];
    if (!(n.cost.w > 0.0) || !(n.cost.g > 0.0) || !std::isfinite(n.cost.w) ||
        !std::isfinite(n.cost.g)) {
      std::ostringstream msg;
      msg << "node " << i << " has w=" << n.cost.w << ", g=" << n.cost.g
          << "; both must be positive and finite";
      out.push_back({ErrorCode::kNonpositiveCost, msg.str()});
    }
    if (n.needs.value >= s.file_count()) {
      out.push_back({ErrorCode::kUnknownFile,
                     "node " + std::to_string(i) + " needs file " +
                         std::to_string(n.needs.value) + " which does not exist"});
    } else {
      ++sizes[n.needs.value];
    }
  }
  for (std::size_t x = 0; x < sizes.size(); ++x) {
    if (sizes[x] < 2) {
      out.push_back({ErrorCode::kGroupTooSmall,
                     "file " + std::to_string(x) + " is needed by " +
                         std::to_string(sizes[x]) + " node(s); at least 2 required"});
    }
  }
  return out;
}

const Scenario& require_valid(const Scenario& s) {
  auto violations = validate_scenario(s);
  if (!violations.empty()) {
    std::string msg = violations.front().message;
    if (violations.size() > 1) {
      msg += " (+" + std::to_string(violations.size() - 1) + " more)";
    }
    ErrorCode code = violations.front().code;
    throw Error(code, msg, std::move(violations));
  }
  return s;
}

GroupStats GroupSums::complement(FileId x) const {
  const GroupStats& own = per_file.at(x.value);
  return {total.size - own.size, total.ratio_sum - own.ratio_sum};
}

GroupSums group_ratio_sums(const Scenario& s) {
  GroupSums out;
  out.per_file.assign(s.file_count(), GroupStats{});
  for (const NodeSpec& n : s.nodes()) {
    GroupStats& gs = out.per_file.at(n.needs.value);
    ++gs.size;
    gs.ratio_sum += n.cost.ratio();
  }
  // Summing group totals keeps complement() consistent with per_file.
  for (const GroupStats& gs : out.per_file) {
    out.total.size += gs.size;
    out.total.ratio_sum += gs.ratio_sum;
  }
  return out;
}

StrategyProfile::StrategyProfile(const Scenario& s)
    : file_count_(s.file_count()),
      gamma_(s.node_count(), 0.0),
      lambda_(s.node_count() * s.file_count()) {
  for (std::uint32_t n = 0; n < s.node_count(); ++n) {
    for (std::uint32_t x = 0; x < file_count_; ++x) {
      if (s.possesses(NodeId{n}, FileId{x})) {
        lambda_[index(NodeId{n}, FileId{x})] = 0.0;
      }
    }
  }
}

std::size_t StrategyProfile::index(NodeId n, FileId x) const {
  if (n.value >= gamma_.size() || x.value >= file_count_) {
    throw Error(ErrorCode::kInvalidArgument, "profile index out of range");
  }
  return static_cast<std::size_t>(n.value) * file_count_ + x.value;
}

void StrategyProfile::set_gamma(NodeId n, double rate) {
  if (!std::isfinite(rate)) {
    throw Error(ErrorCode::kInvalidArgument, "initiation rate must be finite");
  }
  gamma_.at(n.value) = rate;
}

std::optional<double> StrategyProfile::lambda(NodeId n, FileId context) const {
  return lambda_[index(n, context)];
}

void StrategyProfile::set_lambda(NodeId n, FileId context, double rate) {
  auto& slot = lambda_[index(n, context)];
  if (!slot) {
    throw Error(ErrorCode::kInvalidArgument,
                "node " + std::to_string(n.value) + " needs file " +
                    std::to_string(context.value) + " and cannot respond to it");
  }
  if (!std::isfinite(rate)) {
    throw Error(ErrorCode::kInvalidArgument, "response rate must be finite");
  }
  *slot = rate;
}

double StrategyProfile::total_gamma() const {
  double sum = 0.0;
  for (double g : gamma_) sum += g;
  return sum;
}

double StrategyProfile::total_lambda(FileId context) const {
  double sum = 0.0;
  for (std::uint32_t n = 0; n < gamma_.size(); ++n) {
    if (auto l = lambda_[index(NodeId{n}, context)]) sum += *l;
  }
  return sum;
}

bool StrategyProfile::nonnegative() const {
  for (double g : gamma_) {
    if (g < 0.0) return false;
  }
  for (const auto& l : lambda_) {
    if (l && *l < 0.0) return false;
  }
  return true;
}

Metrics::Metrics(const Scenario& s)
    : downloads_(s.node_count(), 0),
      uploads_(s.node_count(), 0),
      cost_accum_(s.node_count(), 0.0) {
  costs_.reserve(s.node_count());
  for (const NodeSpec& n : s.nodes()) costs_.push_back(n.cost);
}

void Metrics::record(const RoundOutcome& round) {
  if (round.downloads.size() != costs_.size() ||
      round.uploads.size() != costs_.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "round outcome does not match the scenario size");
  }
  for (std::size_t n = 0; n < costs_.size(); ++n) {
    downloads_[n] += round.downloads[n];
    uploads_[n] += round.uploads[n];
    cost_accum_[n] += costs_[n].g * round.uploads[n] +
                      costs_[n].w * round.total_duration;
  }
  elapsed_ += round.total_duration;
  ++rounds_;
}

double Metrics::avg_total_cost(NodeId n) const {
  const auto d = downloads_.at(n.value);
  if (d == 0) return std::numeric_limits<double>::infinity();
  return cost_accum_[n.value] / static_cast<double>(d);
}

double Metrics::recomputed_avg_total_cost(NodeId n) const {
  const auto d = downloads_.at(n.value);
  if (d == 0) return std::numeric_limits<double>::infinity();
  const CostParams& c = costs_[n.value];
  return (static_cast<double>(uploads_[n.value]) * c.g + elapsed_ * c.w) /
         static_cast<double>(d);
}

double Metrics::node_throughput(NodeId n) const {
  if (elapsed_ <= 0.0) return 0.0;
  return static_cast<double>(downloads_.at(n.value)) / elapsed_;
}

double Metrics::per_node_throughput() const {
  if (costs_.empty() || elapsed_ <= 0.0) return 0.0;
  double sum = 0.0;
  for (auto d : downloads_) sum += static_cast<double>(d);
  return sum / static_cast<double>(costs_.size()) / elapsed_;
}

}  // namespace wbx
