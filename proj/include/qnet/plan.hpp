#pragma once

#include <compare>
#include <vector>

#include "qnet/metrics.hpp"

namespace qnet {

enum class PathRole { Major, Recovery, Partial };

const char* to_string(PathRole role);

/// A path reserved in P2 together with the channels bound on each hop.
/// Recovery paths are oriented along their host major: nodes.front() sits at
/// major position span_begin and nodes.back() at span_end.
struct ReservedPath {
  Path path;
  PathRole role = PathRole::Major;
  int pair_index = -1;
  int host_major = -1;
  int span_begin = 0;
  int span_end = 0;
  std::vector<std::vector<ChannelId>> hop_channels;  // ascending ids per hop
};

struct RoutingPlan {
  std::vector<ReservedPath> majors;
  std::vector<ReservedPath> recoveries;
  std::vector<ReservedPath> partials;
  std::vector<ChannelId> bound_channels;  // ascending

  /// Appends `p` to the list matching its role and records its channels.
  void add(ReservedPath p);
  void add_channel(ChannelId c);
  /// Channels bound per node and per edge stay within capacity.
  bool feasible(const Topology& topo) const;
  std::size_t path_count() const { return majors.size() + recoveries.size() + partials.size(); }
};

/// Internal link between channels `first` and `second` at `node`; first < second.
struct SwapDecision {
  NodeId node = 0;
  ChannelId first = 0;
  ChannelId second = 0;

  static SwapDecision make(NodeId node, ChannelId a, ChannelId b);
  friend auto operator<=>(const SwapDecision&, const SwapDecision&) = default;
};

/// P2 result: one entry per channel, 1 if the channel was bound and its link
/// was established.
struct LinkOutcomes {
  std::vector<char> up;
  bool operator[](ChannelId c) const { return up[c] != 0; }
};

inline constexpr int kInfiniteRange = -1;

/// What one node knows after P3: the outcomes of channels incident to nodes
/// within k hops of it.
class LinkStateView {
 public:
  LinkStateView(NodeId owner, std::vector<char> known, const LinkOutcomes* outcomes)
      : owner_(owner), known_(std::move(known)), outcomes_(outcomes) {}

  static LinkStateView global(NodeId owner, const Topology& topo, const LinkOutcomes& outcomes);

  NodeId owner() const { return owner_; }
  bool knows(ChannelId c) const { return known_[c] != 0; }
  /// Throws std::out_of_range for a channel outside the view.
  bool up(ChannelId c) const;
  /// Established links among `channels` in ascending id order.
  std::vector<ChannelId> up_links(const std::vector<ChannelId>& channels) const;

 private:
  NodeId owner_;
  std::vector<char> known_;
  const LinkOutcomes* outcomes_;
};

/// Graph distances from `source`, -1 for unreachable.
std::vector<int> hop_distances(const Topology& topo, NodeId source);

LinkStateView view_of(const Topology& topo, const LinkOutcomes& outcomes, NodeId owner, int k);
std::vector<LinkStateView> disseminate(const Topology& topo, const LinkOutcomes& outcomes, int k);

}  // namespace qnet
