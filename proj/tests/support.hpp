#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "qnet/metrics.hpp"
#include "qnet/plan.hpp"
#include "qnet/rng.hpp"
#include "qnet/topology.hpp"

namespace support {

using namespace qnet;

struct EdgeSpec {
  NodeId u, v;
  int width;
  double p;
  double length = 1.0;
};

// Nodes on a horizontal line unless positions are given.
inline Topology make_graph(std::vector<int> capacities, const std::vector<EdgeSpec>& edges,
                           std::vector<Point> positions = {}) {
  std::vector<Node> nodes;
  for (int i = 0; i < static_cast<int>(capacities.size()); ++i)
    nodes.push_back({i, positions.empty() ? Point{double(i), 0.0} : positions[i], capacities[i]});
  Topology topo(std::move(nodes), 0.0);
  for (const auto& e : edges) topo.add_edge(e.u, e.v, e.length, e.width, e.p);
  return topo;
}

// Connected random graph: a random spanning tree plus extra edges.
inline Topology random_graph(std::uint64_t seed, int n, double extra, int max_width = 3, int qmin = 2,
                             int qmax = 8) {
  Rng rng(seed, {0xabc});
  std::vector<Node> nodes;
  for (int i = 0; i < n; ++i)
    nodes.push_back({i, {rng.uniform(0, 10), rng.uniform(0, 10)}, static_cast<int>(rng.uniform_int(qmin, qmax))});
  Topology topo(std::move(nodes), 0.0);
  auto add = [&](int a, int b) {
    if (a == b || topo.edge_between(a, b)) return;
    const int w = static_cast<int>(rng.uniform_int(1, max_width));
    const double p = 0.2 + 0.8 * rng.uniform();
    topo.add_edge(a, b, 0.5 + 4.0 * rng.uniform(), w, p);
  };
  for (int i = 1; i < n; ++i) add(i, static_cast<int>(rng.uniform_int(0, i - 1)));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (rng.bernoulli(extra)) add(a, b);
  return topo;
}

// Reserves `nodes` at `width` on `residual` and returns the plan entry.
inline ReservedPath reserve(const Topology& topo, Residual& residual, std::vector<NodeId> nodes, int width,
                            PathRole role, int pair, int host = -1, int begin = 0, int end = 0) {
  ReservedPath rp;
  rp.hop_channels = residual.reserve(topo, nodes, width);
  rp.path = {std::move(nodes), width};
  rp.role = role;
  rp.pair_index = pair;
  rp.host_major = host;
  rp.span_begin = begin;
  rp.span_end = end;
  return rp;
}

inline LinkOutcomes all_up(const Topology& topo, const RoutingPlan& plan) {
  LinkOutcomes o{std::vector<char>(topo.channel_count(), 0)};
  for (ChannelId c : plan.bound_channels) o.up[c] = 1;
  return o;
}

}  // namespace support
