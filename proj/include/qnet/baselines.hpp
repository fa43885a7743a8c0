#pragma once

#include <span>
#include <vector>

#include "qnet/pathfind.hpp"
#include "qnet/plan.hpp"

namespace qnet {

/// Binds every channel (edges and channels in id order) while both of its
/// endpoints still have a free qubit.
RoutingPlan slmp_p2(const Topology& topo);

struct SlmpRouting {
  std::vector<SwapDecision> swaps;
  std::vector<std::vector<ChannelId>> routes;  // channels from source to destination
  std::vector<int> route_pair;
};

/// Global-knowledge P4: pairs take turns extracting a fewest-hop chain of
/// unused established links until no pair can extend.
SlmpRouting slmp_p4(const Topology& topo, const RoutingPlan& plan, const LinkOutcomes& outcomes,
                    std::span<const SdPair> pairs);

/// Geographic greedy walks of width 1, repeated in rounds over the pairs
/// until a whole round reserves nothing.
RoutingPlan greedy_route(const Topology& topo, std::span<const SdPair> pairs);

}  // namespace qnet
