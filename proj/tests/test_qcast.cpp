#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "qnet/engine.hpp"
#include "qnet/qcast.hpp"
#include "printers.hpp"
#include "support.hpp"

using namespace qnet;
using support::make_graph;

namespace {

// Major A-C-D-E-B (0..4); recoveries D-Y-B (Y=6) and E-X-B (X=5).
struct Loop {
  Topology topo;
  RoutingPlan plan;
};

Loop loop_fixture() {
  Loop f{make_graph({1, 2, 3, 3, 3, 2, 2}, {{0, 1, 1, 0.9},
                                             {1, 2, 1, 0.9},
                                             {2, 3, 1, 0.9},
                                             {3, 4, 1, 0.9},
                                             {3, 5, 1, 0.9},
                                             {5, 4, 1, 0.9},
                                             {2, 6, 1, 0.9},
                                             {6, 4, 1, 0.9}}),
         {}};
  Residual r(f.topo);
  f.plan.add(support::reserve(f.topo, r, {0, 1, 2, 3, 4}, 1, PathRole::Major, 0));
  f.plan.add(support::reserve(f.topo, r, {2, 6, 4}, 1, PathRole::Recovery, 0, 0, 2, 4));
  f.plan.add(support::reserve(f.topo, r, {3, 5, 4}, 1, PathRole::Recovery, 0, 0, 3, 4));
  return f;
}

std::vector<SwapDecision> union_of_nodes(const Topology& topo, const RoutingPlan& plan, const LinkOutcomes& links,
                                         int k) {
  std::vector<SwapDecision> all;
  for (NodeId u = 0; u < topo.node_count(); ++u) {
    auto local = qcast_p4_node(topo, plan, view_of(topo, links, u, k));
    for (const auto& s : local) CHECK(s.node == u);
    all.insert(all.end(), local.begin(), local.end());
  }
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

TEST_SUITE("qcast") {

TEST_CASE("appendix example 1: only the red path, below max flow") {
  using namespace fixture_node;
  const Fixture f = fixture_appendix(1);
  Residual r(f.topology);
  const std::vector<SdPair> pairs{{f.source, f.destination}};
  QCastConfig cfg;
  const auto majors = qcast_p2_select(f.topology, r, pairs, f.swap_rate, cfg);
  REQUIRE(majors.size() == 1);
  CHECK(majors[0].path == Path{{S, A, B, T}, 3});
  CHECK(majors[0].path.width < max_flow_width(f.topology, Residual(f.topology), S, T));
}

TEST_CASE("appendix example 2: red (2,3)-path first") {
  using namespace fixture_node;
  const Fixture f = fixture_appendix(2);
  Residual r(f.topology);
  const std::vector<SdPair> pairs{{f.source, f.destination}};
  const auto majors = qcast_p2_select(f.topology, r, pairs, f.swap_rate, QCastConfig{});
  REQUIRE_FALSE(majors.empty());
  CHECK(majors[0].path == Path{{S, A, B, T}, 2});
  CHECK(ext(f.topology, majors[0].path, 1.0) == doctest::Approx(0.63936));
}

TEST_CASE("disjoint pairs are both served, best first") {
  // Two corridors joined by a weak bridge.
  const Topology t = make_graph({4, 8, 4, 4, 8, 4}, {{0, 1, 2, 0.9}, {1, 2, 2, 0.9}, {2, 3, 1, 0.1},
                                                      {3, 4, 2, 0.6}, {4, 5, 2, 0.6}});
  Residual r(t);
  const std::vector<SdPair> pairs{{3, 5}, {0, 2}};
  const auto majors = qcast_p2_select(t, r, pairs, 0.9, QCastConfig{});
  REQUIRE(majors.size() == 2);
  CHECK(majors[0].pair_index == 1);
  CHECK(majors[1].pair_index == 0);
  CHECK(majors[0].path.nodes == std::vector<NodeId>{0, 1, 2});
  CHECK(majors[1].path.nodes == std::vector<NodeId>{3, 4, 5});
}

TEST_CASE("recovery paths connect major nodes within k hops") {
  const Topology t = make_graph({2, 4, 4, 4, 3, 4, 4}, {{0, 1, 1, 0.9},
                                                         {1, 2, 1, 0.9},
                                                         {2, 3, 1, 0.9},
                                                         {3, 4, 1, 0.9},
                                                         {3, 5, 1, 0.8},
                                                         {5, 4, 1, 0.8},
                                                         {2, 6, 1, 0.7},
                                                         {6, 4, 1, 0.7}});
  const std::vector<SdPair> pairs{{0, 4}};
  QCastConfig cfg;
  cfg.k = 2;
  const RoutingPlan plan = qcast_plan(t, pairs, 0.9, cfg, true);
  REQUIRE(plan.majors.size() == 1);
  CHECK(plan.majors[0].path.nodes == std::vector<NodeId>{0, 1, 2, 3, 4});
  REQUIRE(plan.recoveries.size() == 2);
  for (const auto& rec : plan.recoveries) {
    const auto& major = plan.majors[rec.host_major].path.nodes;
    CHECK(rec.span_end - rec.span_begin <= cfg.k);
    CHECK(rec.path.nodes.front() == major[rec.span_begin]);
    CHECK(rec.path.nodes.back() == major[rec.span_end]);
  }
  CHECK(plan.recoveries[0].path.nodes == std::vector<NodeId>{3, 5, 4});
  CHECK(plan.recoveries[1].path.nodes == std::vector<NodeId>{2, 6, 4});
  CHECK(oracle::within_capacity(t, plan.bound_channels));

  cfg.k = 0;
  CHECK(qcast_plan(t, pairs, 0.9, cfg, true).recoveries.empty());
  cfg.k = 1;
  CHECK(qcast_plan(t, pairs, 0.9, cfg, true).recoveries.size() == 1);
}

TEST_CASE("exhausted residual builds no recovery") {
  const Topology t = make_graph({2, 2, 2}, {{0, 1, 2, 0.9}, {1, 2, 2, 0.9}, {0, 2, 2, 0.5}});
  Residual r(t);
  const std::vector<SdPair> pairs{{0, 2}};
  QCastConfig cfg;
  const auto majors = qcast_p2_select(t, r, pairs, 0.9, cfg);
  REQUIRE_FALSE(majors.empty());
  for (NodeId u = 0; u < 3; ++u) r.set_free_qubits(u, 0);
  CHECK(qcast_build_recovery(t, r, majors, 0.9, cfg).empty());
}

TEST_CASE("shorter recovery covers the failed hop") {
  const Loop f = loop_fixture();
  LinkOutcomes links = support::all_up(f.topo, f.plan);
  links.up[3] = 0;  // E-B
  const std::vector<SwapDecision> want{SwapDecision::make(1, 0, 1), SwapDecision::make(2, 1, 2),
                                       SwapDecision::make(3, 2, 4), SwapDecision::make(5, 4, 5),
                                       SwapDecision::make(6, 6, 7)};
  CHECK(qcast_p4(f.topo, f.plan, links) == want);
  CHECK(union_of_nodes(f.topo, f.plan, links, 2) == want);
  const std::vector<SdPair> pairs{{0, 4}};
  const auto result = execute_swaps(f.topo, want, links, pairs, channel_use(f.topo, f.plan), 1.0, 1, 0);
  CHECK(result.ebits[0] == 1);
  CHECK(result.recovery_used[0]);
}

TEST_CASE("selection ignores the recovery's own link states") {
  const Loop f = loop_fixture();
  LinkOutcomes links = support::all_up(f.topo, f.plan);
  links.up[3] = 0;  // E-B
  links.up[4] = 0;  // E-X
  const auto swaps = qcast_p4(f.topo, f.plan, links);
  // E keeps the shorter E-X-B recovery but its first link is down.
  const std::vector<SwapDecision> want{SwapDecision::make(1, 0, 1), SwapDecision::make(2, 1, 2),
                                       SwapDecision::make(6, 6, 7)};
  CHECK(swaps == want);
  const std::vector<SdPair> pairs{{0, 4}};
  CHECK(execute_swaps(f.topo, swaps, links, pairs, channel_use(f.topo, f.plan), 1.0, 1, 0).ebits[0] == 0);
}

TEST_CASE("longer recovery covers two failed hops") {
  const Loop f = loop_fixture();
  LinkOutcomes links = support::all_up(f.topo, f.plan);
  links.up[2] = 0;  // D-E
  links.up[3] = 0;  // E-B
  const auto swaps = qcast_p4(f.topo, f.plan, links);
  CHECK(std::find(swaps.begin(), swaps.end(), SwapDecision::make(2, 1, 6)) != swaps.end());
  const std::vector<SdPair> pairs{{0, 4}};
  const auto r = execute_swaps(f.topo, swaps, links, pairs, channel_use(f.topo, f.plan), 1.0, 1, 0);
  CHECK(r.ebits[0] == 1);
  CHECK(r.recovery_used[0]);
}

TEST_CASE("no failures: route is the major") {
  const Loop f = loop_fixture();
  const LinkOutcomes links = support::all_up(f.topo, f.plan);
  // Repeaters X and Y join their recovery links even when unused.
  const std::vector<SwapDecision> want{SwapDecision::make(1, 0, 1), SwapDecision::make(2, 1, 2),
                                       SwapDecision::make(3, 2, 3), SwapDecision::make(5, 4, 5),
                                       SwapDecision::make(6, 6, 7)};
  CHECK(qcast_p4(f.topo, f.plan, links) == want);
  const std::vector<SdPair> pairs{{0, 4}};
  const auto r = execute_swaps(f.topo, want, links, pairs, channel_use(f.topo, f.plan), 1.0, 1, 0);
  CHECK(r.ebits[0] == 1);
  CHECK_FALSE(r.recovery_used[0]);
}

TEST_CASE("failure on the major and every cover yields nothing") {
  const Loop f = loop_fixture();
  LinkOutcomes links = support::all_up(f.topo, f.plan);
  links.up[3] = 0;
  links.up[5] = 0;  // X-B
  links.up[7] = 0;  // Y-B
  const auto swaps = qcast_p4(f.topo, f.plan, links);
  const std::vector<SdPair> pairs{{0, 4}};
  CHECK(execute_swaps(f.topo, swaps, links, pairs, channel_use(f.topo, f.plan), 1.0, 1, 0).ebits[0] == 0);
}

TEST_CASE("plans are contention-free on generated networks") {
  WaxmanParams w;
  w.n = 40;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    w.seed = seed;
    const Topology g = generate_waxman(w);
    QCastConfig cfg;
    cfg.h_m = calibrate_h_m(g, 0.9, seed);
    for (int slot = 0; slot < 15; ++slot) {
      const auto pairs = draw_sd_pairs(g.node_count(), 10, seed, slot);
      const RoutingPlan plan = qcast_plan(g, pairs, 0.9, cfg, true);
      CHECK(plan.feasible(g));
      CHECK(oracle::within_capacity(g, plan.bound_channels));
      CHECK(static_cast<int>(plan.path_count()) <= cfg.max_paths);
      for (const auto& m : plan.majors) CHECK(m.path.hops() <= cfg.h_m);
    }
  }
}

TEST_CASE("per-node decisions equal the centralized pass") {
  WaxmanParams w;
  w.n = 30;
  w.seed = 5;
  const Topology g = generate_waxman(w);
  for (int k : {0, 1, 3, kInfiniteRange}) {
    QCastConfig cfg;
    cfg.k = k;
    cfg.h_m = calibrate_h_m(g, 0.9, 1);
    for (int slot = 0; slot < 15; ++slot) {
      const auto pairs = draw_sd_pairs(g.node_count(), 8, 2, slot);
      const RoutingPlan plan = qcast_plan(g, pairs, 0.9, cfg, true);
      const LinkOutcomes links = realize_links(g, plan, 7, slot);
      CHECK(qcast_p4(g, plan, links) == union_of_nodes(g, plan, links, k));
    }
  }
}

}
