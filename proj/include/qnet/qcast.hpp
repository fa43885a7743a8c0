#pragma once

#include <span>
#include <vector>

#include "qnet/pathfind.hpp"
#include "qnet/plan.hpp"

namespace qnet {

struct QCastConfig {
  int max_paths = kDefaultMaxPaths;  // K_m, majors and recoveries together
  int recovery_per_span = 1;         // R
  int k = 3;                         // link-state range, kInfiniteRange for unbounded
  int h_m = kNoHopLimit;
};

/// G-EDA major path selection under EXT. Reserves on `residual`.
std::vector<ReservedPath> qcast_p2_select(const Topology& topo, Residual& residual,
                                          std::span<const SdPair> pairs, double swap_rate,
                                          const QCastConfig& config,
                                          std::span<const double> boost = {});

/// Recovery paths between major nodes at most k hops apart, found by EDA in
/// the residual left by the majors and reserved as found.
std::vector<ReservedPath> qcast_build_recovery(const Topology& topo, Residual& residual,
                                               std::span<const ReservedPath> majors,
                                               double swap_rate, const QCastConfig& config);

/// Majors followed (optionally) by recoveries for one slot.
RoutingPlan qcast_plan(const Topology& topo, std::span<const SdPair> pairs, double swap_rate,
                       const QCastConfig& config, bool with_recovery,
                       std::span<const double> boost = {});

/// P4 with global link state.
std::vector<SwapDecision> qcast_p4(const Topology& topo, const RoutingPlan& plan,
                                   const LinkOutcomes& outcomes);

/// P4 decisions taken at view.owner() using only that node's view.
std::vector<SwapDecision> qcast_p4_node(const Topology& topo, const RoutingPlan& plan,
                                        const LinkStateView& view);

}  // namespace qnet
