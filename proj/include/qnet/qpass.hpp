#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "qnet/pathfind.hpp"
#include "qnet/plan.hpp"

namespace qnet {

/// Offline candidate paths per unordered node pair. Entries are computed on
/// first use; paths are stored oriented from the smaller node id.
class OfflinePathTable {
 public:
  struct Entry {
    int yen_count = kDefaultYenCount;
    bool ready = false;
    std::vector<Path> paths;
  };

  OfflinePathTable() = default;
  OfflinePathTable(MetricEvaluator metric, int initial_count = kDefaultYenCount)
      : metric_(metric), initial_count_(initial_count) {}

  const MetricEvaluator& metric() const { return metric_; }
  int initial_count() const { return initial_count_; }

  /// Candidates oriented from `source` to `destination`.
  std::vector<Path> candidates(const Topology& topo, NodeId source, NodeId destination);
  const Entry& entry(const Topology& topo, NodeId a, NodeId b);
  int yen_count(NodeId a, NodeId b) const;
  /// L grows by half (rounded up); the entry is recomputed on next use.
  void grow(NodeId a, NodeId b);
  void precompute(const Topology& topo);

  const std::map<std::pair<NodeId, NodeId>, Entry>& entries() const { return entries_; }
  void set_entry(NodeId a, NodeId b, Entry e);

 private:
  static std::pair<NodeId, NodeId> key(NodeId a, NodeId b) { return {std::min(a, b), std::max(a, b)}; }

  MetricEvaluator metric_{MetricKind::CreationRate, 1.0};
  int initial_count_ = kDefaultYenCount;
  std::map<std::pair<NodeId, NodeId>, Entry> entries_;
};

/// Candidate table for every unordered node pair.
OfflinePathTable qpass_offline(const Topology& topo, const MetricEvaluator& metric,
                               int initial_count = kDefaultYenCount);

/// Adaptive resource allocation: majors from the candidate queue, then
/// (with_partials) width-1 prefixes and suffixes of the leftover candidates.
/// Pairs whose every candidate became a major get their L grown.
RoutingPlan qpass_p2(const Topology& topo, std::span<const SdPair> pairs, OfflinePathTable& table,
                     bool with_partials, std::span<const double> boost = {});

/// Segment-based P4 with global link state. Segments span k+1 hops.
std::vector<SwapDecision> qpass_p4(const Topology& topo, const RoutingPlan& plan,
                                   const LinkOutcomes& outcomes, int k);

std::vector<SwapDecision> qpass_p4_node(const Topology& topo, const RoutingPlan& plan,
                                        const LinkStateView& view, int k);

}  // namespace qnet
