#include "qnet/plan.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <string>

namespace qnet {

const char* to_string(PathRole role) {
  switch (role) {
    case PathRole::Major: return "major";
    case PathRole::Recovery: return "recovery";
    case PathRole::Partial: return "partial";
  }
  return "?";
}

void RoutingPlan::add_channel(ChannelId c) {
  auto it = std::lower_bound(bound_channels.begin(), bound_channels.end(), c);
  if (it != bound_channels.end() && *it == c) throw std::logic_error("channel bound twice");
  bound_channels.insert(it, c);
}

void RoutingPlan::add(ReservedPath p) {
  for (const auto& hop : p.hop_channels)
    for (ChannelId c : hop) add_channel(c);
  switch (p.role) {
    case PathRole::Major: majors.push_back(std::move(p)); break;
    case PathRole::Recovery: recoveries.push_back(std::move(p)); break;
    case PathRole::Partial: partials.push_back(std::move(p)); break;
  }
}

bool RoutingPlan::feasible(const Topology& topo) const {
  std::vector<int> used(topo.node_count(), 0), per_edge(topo.edge_count(), 0);
  for (std::size_t i = 0; i < bound_channels.size(); ++i) {
    if (i > 0 && bound_channels[i] == bound_channels[i - 1]) return false;
    const Channel& c = topo.channel(bound_channels[i]);
    ++used[c.u];
    ++used[c.v];
    ++per_edge[c.edge];
  }
  for (const auto& n : topo.nodes())
    if (used[n.id] > n.qubit_capacity) return false;
  for (const auto& e : topo.edges())
    if (per_edge[e.id] > e.width()) return false;
  return true;
}

SwapDecision SwapDecision::make(NodeId node, ChannelId a, ChannelId b) {
  if (a == b) throw std::logic_error("swap joins a channel with itself");
  return {node, std::min(a, b), std::max(a, b)};
}

LinkStateView LinkStateView::global(NodeId owner, const Topology& topo, const LinkOutcomes& outcomes) {
  return {owner, std::vector<char>(topo.channel_count(), 1), &outcomes};
}

bool LinkStateView::up(ChannelId c) const {
  if (c < 0 || c >= static_cast<ChannelId>(known_.size()) || !known_[c])
    throw std::out_of_range("node " + std::to_string(owner_) + " has no link state for channel " +
                            std::to_string(c));
  return (*outcomes_)[c];
}

std::vector<ChannelId> LinkStateView::up_links(const std::vector<ChannelId>& channels) const {
  std::vector<ChannelId> out;
  for (ChannelId c : channels)
    if (up(c)) out.push_back(c);
  return out;
}

std::vector<int> hop_distances(const Topology& topo, NodeId source) {
  std::vector<int> dist(topo.node_count(), -1);
  std::queue<NodeId> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    NodeId u = frontier.front();
    frontier.pop();
    for (const auto& a : topo.neighbors(u))
      if (dist[a.neighbor] < 0) {
        dist[a.neighbor] = dist[u] + 1;
        frontier.push(a.neighbor);
      }
  }
  return dist;
}

LinkStateView view_of(const Topology& topo, const LinkOutcomes& outcomes, NodeId owner, int k) {
  if (k == kInfiniteRange) return LinkStateView::global(owner, topo, outcomes);
  if (k < 0) throw std::invalid_argument("link-state range must be >= 0");
  std::vector<char> known(topo.channel_count(), 0);
  const auto dist = hop_distances(topo, owner);
  for (const auto& n : topo.nodes()) {
    if (dist[n.id] < 0 || dist[n.id] > k) continue;
    for (const auto& a : topo.neighbors(n.id))
      for (ChannelId c : topo.edge(a.edge).channels) known[c] = 1;
  }
  return {owner, std::move(known), &outcomes};
}

std::vector<LinkStateView> disseminate(const Topology& topo, const LinkOutcomes& outcomes, int k) {
  std::vector<LinkStateView> views;
  views.reserve(topo.node_count());
  for (NodeId u = 0; u < topo.node_count(); ++u) views.push_back(view_of(topo, outcomes, u, k));
  return views;
}

}  // namespace qnet
