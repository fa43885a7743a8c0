#include "qnet/baselines.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace qnet {

RoutingPlan slmp_p2(const Topology& topo) {
  std::vector<int> free(topo.node_count());
  for (const auto& n : topo.nodes()) free[n.id] = n.qubit_capacity;
  RoutingPlan plan;
  for (const auto& e : topo.edges())
    for (ChannelId c : e.channels) {
      if (free[e.u] < 1 || free[e.v] < 1) break;
      --free[e.u];
      --free[e.v];
      plan.bound_channels.push_back(c);
    }
  std::sort(plan.bound_channels.begin(), plan.bound_channels.end());
  return plan;
}

SlmpRouting slmp_p4(const Topology& topo, const RoutingPlan& plan, const LinkOutcomes& outcomes,
                    std::span<const SdPair> pairs) {
  // Unused established links per edge, lowest id first.
  std::vector<std::vector<ChannelId>> avail(topo.edge_count());
  for (ChannelId c : plan.bound_channels)
    if (outcomes[c]) avail[topo.channel(c).edge].push_back(c);
  for (auto& a : avail) std::reverse(a.begin(), a.end());

  SlmpRouting out;
  std::vector<char> active(pairs.size(), 1);
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      if (!active[p]) continue;
      const NodeId s = pairs[p].source, d = pairs[p].destination;
      std::vector<EdgeId> via(topo.node_count(), -1);
      std::vector<char> seen(topo.node_count(), 0);
      std::queue<NodeId> frontier;
      frontier.push(s);
      seen[s] = 1;
      while (!frontier.empty() && !seen[d]) {
        NodeId u = frontier.front();
        frontier.pop();
        for (const auto& a : topo.neighbors(u))
          if (!seen[a.neighbor] && !avail[a.edge].empty()) {
            seen[a.neighbor] = 1;
            via[a.neighbor] = a.edge;
            frontier.push(a.neighbor);
          }
      }
      if (s == d || !seen[d]) {
        active[p] = 0;
        continue;
      }
      std::vector<NodeId> nodes{d};
      std::vector<ChannelId> route;
      for (NodeId v = d; v != s;) {
        const Edge& e = topo.edge(via[v]);
        route.push_back(avail[e.id].back());
        avail[e.id].pop_back();
        v = e.other(v);
        nodes.push_back(v);
      }
      std::reverse(route.begin(), route.end());
      std::reverse(nodes.begin(), nodes.end());
      for (std::size_t i = 1; i + 1 < nodes.size(); ++i)
        out.swaps.push_back(SwapDecision::make(nodes[i], route[i - 1], route[i]));
      out.routes.push_back(std::move(route));
      out.route_pair.push_back(static_cast<int>(p));
      progress = true;
    }
  }
  std::sort(out.swaps.begin(), out.swaps.end());
  return out;
}

RoutingPlan greedy_route(const Topology& topo, std::span<const SdPair> pairs) {
  Residual residual(topo);
  RoutingPlan plan;
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const NodeId s = pairs[p].source, d = pairs[p].destination;
      if (s == d || residual.free_qubits(s) < 1 || residual.free_qubits(d) < 1) continue;
      const Point target = topo.node(d).position;
      std::vector<NodeId> walk{s};
      bool reached = false;
      while (true) {
        const NodeId x = walk.back();
        const double here = distance(topo.node(x).position, target);
        NodeId best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (const auto& a : topo.neighbors(x)) {
          const NodeId v = a.neighbor;
          if (residual.free_channels(a.edge) < 1) continue;
          if (residual.free_qubits(v) < (v == d ? 1 : 2)) continue;
          const double dv = distance(topo.node(v).position, target);
          if (dv < best_d) {
            best_d = dv;
            best = v;
          }
        }
        if (best < 0 || best_d >= here) break;
        walk.push_back(best);
        if (best == d) {
          reached = true;
          break;
        }
      }
      if (!reached) continue;
      ReservedPath rp;
      rp.hop_channels = residual.reserve(topo, walk, 1);
      rp.path = Path{std::move(walk), 1};
      rp.role = PathRole::Major;
      rp.pair_index = static_cast<int>(p);
      rp.span_end = rp.path.hops();
      plan.add(std::move(rp));
      progress = true;
    }
  }
  return plan;
}

}  // namespace qnet
