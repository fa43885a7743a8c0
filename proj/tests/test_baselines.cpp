#include <doctest.h>

#include "oracles.hpp"
#include "qnet/baselines.hpp"
#include "qnet/engine.hpp"
#include "printers.hpp"
#include "support.hpp"

using namespace qnet;
using support::make_graph;

TEST_SUITE("baselines") {

TEST_CASE("slmp binds every channel when qubits abound") {
  const Topology t = make_graph({20, 20, 20}, {{0, 1, 3, 0.5}, {1, 2, 4, 0.5}});
  const RoutingPlan plan = slmp_p2(t);
  CHECK(plan.bound_channels.size() == 7);
}

TEST_CASE("slmp stops at qubit exhaustion") {
  const Topology star = make_graph({1, 5, 5, 5}, {{0, 1, 1, 0.5}, {0, 2, 1, 0.5}, {0, 3, 1, 0.5}});
  CHECK(slmp_p2(star).bound_channels == std::vector<ChannelId>{0});
  const Topology dead = make_graph({5, 0, 5}, {{0, 1, 2, 0.5}, {1, 2, 2, 0.5}, {0, 2, 1, 0.5}});
  CHECK(slmp_p2(dead).bound_channels == std::vector<ChannelId>{4});
  WaxmanParams w;
  w.n = 50;
  const Topology g = generate_waxman(w);
  CHECK(oracle::within_capacity(g, slmp_p2(g).bound_channels));
}

TEST_CASE("slmp extracts one route on a corridor") {
  const Topology t = make_graph({1, 2, 1}, {{0, 1, 1, 1.0}, {1, 2, 1, 1.0}});
  const RoutingPlan plan = slmp_p2(t);
  const std::vector<SdPair> pairs{{0, 2}};
  const auto r = slmp_p4(t, plan, support::all_up(t, plan), pairs);
  REQUIRE(r.routes.size() == 1);
  CHECK(r.routes[0] == std::vector<ChannelId>{0, 1});
  CHECK(r.swaps == std::vector<SwapDecision>{SwapDecision::make(1, 0, 1)});
}

TEST_CASE("slmp alternates pairs over a shared corridor") {
  // 0,1 feed node 2; corridor 2-3 of width 2; 3 feeds 4,5.
  const Topology t = make_graph({2, 2, 6, 6, 2, 2}, {{0, 2, 2, 1.0}, {1, 2, 2, 1.0}, {2, 3, 2, 1.0},
                                                      {3, 4, 2, 1.0}, {3, 5, 2, 1.0}});
  const RoutingPlan plan = slmp_p2(t);
  const std::vector<SdPair> pairs{{0, 5}, {1, 4}};
  const auto r = slmp_p4(t, plan, support::all_up(t, plan), pairs);
  CHECK(r.route_pair == std::vector<int>{0, 1});
  for (const auto& route : r.routes) CHECK(route.size() == 3);
}

TEST_CASE("slmp finds nothing without surviving links") {
  const Topology t = make_graph({2, 2, 2}, {{0, 1, 1, 1.0}, {1, 2, 1, 1.0}});
  const RoutingPlan plan = slmp_p2(t);
  LinkOutcomes down = support::all_up(t, plan);
  down.up[1] = 0;
  const std::vector<SdPair> pairs{{0, 2}};
  CHECK(slmp_p4(t, plan, down, pairs).routes.empty());
}

TEST_CASE("greedy follows a straight corridor") {
  const Topology t = make_graph({1, 2, 2, 1}, {{0, 1, 1, 0.9}, {1, 2, 1, 0.9}, {2, 3, 1, 0.9}});
  const std::vector<SdPair> pairs{{0, 3}};
  const RoutingPlan plan = greedy_route(t, pairs);
  REQUIRE(plan.majors.size() == 1);
  CHECK(plan.majors[0].path == Path{{0, 1, 2, 3}, 1});
}

TEST_CASE("greedy aborts at a local minimum") {
  // s=0 at the origin, d=1 far right, dead end 2 close to d, detour 3 above.
  const Topology t = make_graph({2, 2, 2, 2}, {{0, 2, 1, 0.9}, {0, 3, 1, 0.9}, {3, 1, 1, 0.9}},
                                {{0, 0}, {10, 0}, {6, 0}, {0, 5}});
  const std::vector<SdPair> pairs{{0, 1}};
  CHECK(greedy_route(t, pairs).majors.empty());
}

TEST_CASE("greedy contention on a two-qubit transit node") {
  // Node 4 at the centre has two qubits: one transit only.
  const Topology t = make_graph({2, 2, 2, 2, 2}, {{0, 4, 1, 0.9}, {4, 1, 1, 0.9}, {2, 4, 1, 0.9}, {4, 3, 1, 0.9}},
                                {{-1, 0}, {1, 0}, {0, -1}, {0, 1}, {0, 0}});
  const std::vector<SdPair> pairs{{0, 1}, {2, 3}};
  const RoutingPlan plan = greedy_route(t, pairs);
  REQUIRE(plan.majors.size() == 1);
  CHECK(plan.majors[0].pair_index == 0);
  CHECK(oracle::within_capacity(t, plan.bound_channels));
}

TEST_CASE("greedy plans stay within capacity") {
  WaxmanParams w;
  w.n = 50;
  const Topology g = generate_waxman(w);
  for (int slot = 0; slot < 20; ++slot) {
    const auto pairs = draw_sd_pairs(g.node_count(), 10, 3, slot);
    const RoutingPlan plan = greedy_route(g, pairs);
    CHECK(oracle::within_capacity(g, plan.bound_channels));
    CHECK(greedy_route(g, pairs).bound_channels == plan.bound_channels);
  }
}

}
