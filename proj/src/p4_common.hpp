#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "qnet/plan.hpp"

namespace qnet::detail {

struct Occurrence {
  int path;
  int position;
};

// Where each node appears in the plan's path lists.
struct PlanIndex {
  std::vector<std::vector<Occurrence>> majors, recoveries, partials;

  PlanIndex(const Topology& topo, const RoutingPlan& plan)
      : majors(topo.node_count()), recoveries(topo.node_count()), partials(topo.node_count()) {
    fill(majors, plan.majors);
    fill(recoveries, plan.recoveries);
    fill(partials, plan.partials);
  }

 private:
  static void fill(std::vector<std::vector<Occurrence>>& at, const std::vector<ReservedPath>& paths) {
    for (int p = 0; p < static_cast<int>(paths.size()); ++p) {
      const auto& nodes = paths[p].path.nodes;
      for (int i = 0; i < static_cast<int>(nodes.size()); ++i) at[nodes[i]].push_back({p, i});
    }
  }
};

// Established links per hop of each path, looked up through a view on demand.
class UpLinkCache {
 public:
  UpLinkCache(const LinkStateView& view, const std::vector<ReservedPath>& paths)
      : view_(view), paths_(paths), cache_(paths.size()) {}

  const std::vector<ChannelId>& at(int path, int hop) {
    auto& per_path = cache_[path];
    if (per_path.empty()) per_path.resize(paths_[path].hop_channels.size());
    auto& slot = per_path[hop];
    if (!slot) slot = view_.up_links(paths_[path].hop_channels[hop]);
    return *slot;
  }

  int count(int path, int hop) { return static_cast<int>(at(path, hop).size()); }

  // The j-th established link (1-based) of a hop, if any.
  std::optional<ChannelId> nth(int path, int hop, int j) {
    const auto& links = at(path, hop);
    if (j < 1 || j > static_cast<int>(links.size())) return std::nullopt;
    return links[j - 1];
  }

 private:
  const LinkStateView& view_;
  const std::vector<ReservedPath>& paths_;
  std::vector<std::vector<std::optional<std::vector<ChannelId>>>> cache_;
};

// Repeaters inside a helper path join the c-th links on both sides for every c.
inline void swap_through(std::vector<SwapDecision>& out, NodeId node, UpLinkCache& links, int path,
                         int position, int width) {
  for (int c = 1; c <= width; ++c) {
    auto left = links.nth(path, position - 1, c);
    auto right = links.nth(path, position, c);
    if (left && right) out.push_back(SwapDecision::make(node, *left, *right));
  }
}

inline void finalize(std::vector<SwapDecision>& out) {
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

}  // namespace qnet::detail
