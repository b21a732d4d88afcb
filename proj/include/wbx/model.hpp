// Domain types for the broadcast exchange game: scenarios, strategy
// profiles, round outcomes and per-node cost accounting.
//
// Time is measured in data-packet transmissions. Control packets are free.

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wbx {

enum class ErrorCode {
  kGroupTooSmall,
  kNonpositiveCost,
  kTooFewFiles,
  kUnknownFile,
  kNegativeRate,
  kSingularUnexpected,
  kDegenerate,
  kStall,
  kNonpositiveObservation,
  kInvalidArgument,
  kConfig,
};

std::string_view to_string(ErrorCode code);

struct Violation {
  ErrorCode code;
  std::string message;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::vector<Violation> violations = {});

  ErrorCode code() const noexcept { return code_; }
  const std::vector<Violation>& violations() const noexcept {
    return violations_;
  }

 private:
  ErrorCode code_;
  std::vector<Violation> violations_;
};

// Files are ordered by index; index 0 has the highest lexicographic order.
struct FileId {
  std::uint32_t value = 0;
  friend auto operator<=>(FileId, FileId) = default;
};

struct NodeId {
  std::uint32_t value = 0;
  friend auto operator<=>(NodeId, NodeId) = default;
};

struct CostParams {
  double w = 1.0;  // waiting cost per unit time
  double g = 1.0;  // cost per transmitted data packet

  double ratio() const { return w / g; }
};

struct NodeSpec {
  CostParams cost;
  FileId needs;
};

/// A population of nodes, each missing exactly one file and holding all the
/// others. Construction does not validate; see validate_scenario().
class Scenario {
 public:
  Scenario() = default;
  Scenario(std::size_t file_count, std::vector<NodeSpec> nodes);

  std::size_t file_count() const { return file_count_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::span<const NodeSpec> nodes() const { return nodes_; }

  const NodeSpec& node(NodeId n) const { return nodes_.at(n.value); }
  FileId needs(NodeId n) const { return node(n).needs; }
  const CostParams& cost(NodeId n) const { return node(n).cost; }
  double ratio(NodeId n) const { return node(n).cost.ratio(); }
  bool possesses(NodeId n, FileId x) const { return needs(n) != x; }

  /// Nodes needing file x, in index order.
  std::vector<NodeId> group(FileId x) const;
  /// Nodes holding file x (everyone outside x's group), in index order.
  std::vector<NodeId> holders(FileId x) const;

 private:
  std::size_t file_count_ = 0;
  std::vector<NodeSpec> nodes_;
};

/// Complete list of invariant violations; empty means valid.
std::vector<Violation> validate_scenario(const Scenario& s);

/// Throws Error(first violation's code) carrying all violations.
const Scenario& require_valid(const Scenario& s);

struct GroupStats {
  std::size_t size = 0;
  double ratio_sum = 0.0;  // sum of w/g over the group
};

struct GroupSums {
  std::vector<GroupStats> per_file;
  GroupStats total;

  /// Stats over every node that does not need x.
  GroupStats complement(FileId x) const;
};

GroupSums group_ratio_sums(const Scenario& s);

/// Exponential-timer parameters for every node. A rate of exactly zero means
/// the timer never fires. Response rates exist only for contexts (announced
/// files) the node holds.
class StrategyProfile {
 public:
  StrategyProfile() = default;
  explicit StrategyProfile(const Scenario& s);

  std::size_t node_count() const { return gamma_.size(); }
  std::size_t file_count() const { return file_count_; }

  double gamma(NodeId n) const { return gamma_.at(n.value); }
  void set_gamma(NodeId n, double rate);

  /// Response rate of n after a node needing `context` initiates; empty when
  /// n itself needs `context`.
  std::optional<double> lambda(NodeId n, FileId context) const;
  void set_lambda(NodeId n, FileId context, double rate);

  double total_gamma() const;
  /// Sum of response rates of all holders of `context`.
  double total_lambda(FileId context) const;

  /// True when every defined rate is >= 0.
  bool nonnegative() const;

 private:
  std::size_t index(NodeId n, FileId x) const;

  std::size_t file_count_ = 0;
  std::vector<double> gamma_;
  std::vector<std::optional<double>> lambda_;
};

struct RoundOutcome {
  NodeId initiator;
  NodeId responder;
  double initiation_duration = 0.0;
  double response_duration = 0.0;
  double total_duration = 0.0;  // initiation + response + 2
  std::vector<std::uint8_t> downloads;
  std::vector<std::uint8_t> uploads;
};

/// Running per-node download/upload counters with an incrementally
/// maintained cost accumulator.
class Metrics {
 public:
  Metrics() = default;
  explicit Metrics(const Scenario& s);

  void record(const RoundOutcome& round);

  std::size_t node_count() const { return costs_.size(); }
  std::uint64_t rounds() const { return rounds_; }
  double elapsed() const { return elapsed_; }
  std::uint64_t downloads(NodeId n) const { return downloads_.at(n.value); }
  std::uint64_t uploads(NodeId n) const { return uploads_.at(n.value); }

  /// Accumulated cost divided by downloads (incremental path).
  double avg_total_cost(NodeId n) const;
  /// (u*g + t*w) / d from the raw counters.
  double recomputed_avg_total_cost(NodeId n) const;
  double node_throughput(NodeId n) const;
  /// Mean over nodes of d_n / t.
  double per_node_throughput() const;

 private:
  std::vector<CostParams> costs_;
  std::vector<std::uint64_t> downloads_;
  std::vector<std::uint64_t> uploads_;
  std::vector<double> cost_accum_;
  std::uint64_t rounds_ = 0;
  double elapsed_ = 0.0;
};

}  // namespace wbx
