#include <doctest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "qnet/pathfind.hpp"
#include "printers.hpp"
#include "support.hpp"

using namespace qnet;
using support::make_graph;

TEST_SUITE("pathfind") {

TEST_CASE("eda prefers the wide two-hop route") {
  const Topology t = make_graph({4, 4, 4}, {{0, 2, 1, 0.5}, {0, 1, 2, 0.9}, {1, 2, 2, 0.9}});
  const std::vector<double> direct{0.5}, around{0.9, 0.9};
  CHECK(oracle::expected_ebits(direct, 1, 0.9) == doctest::Approx(0.45));
  CHECK(oracle::expected_ebits(around, 2, 0.9) == doctest::Approx(1.325).epsilon(1e-3));
  const auto r = eda(t, Residual(t), 0, 2, {MetricKind::Ext, 0.9});
  REQUIRE(r);
  CHECK(r->path.nodes == std::vector<NodeId>{0, 1, 2});
  CHECK(r->path.width == 2);
  CHECK(r->score.primary == doctest::Approx(oracle::expected_ebits(around, 2, 0.9)));
}

TEST_CASE("eda on a single edge") {
  const Topology t = make_graph({3, 3}, {{0, 1, 3, 0.7}});
  const auto r = eda(t, Residual(t), 0, 1, {MetricKind::Ext, 0.9});
  REQUIRE(r);
  CHECK(r->path == Path{{0, 1}, 3});
}

TEST_CASE("eda respects the hop bound and residual") {
  const Topology t = make_graph({2, 2, 2, 2}, {{0, 1, 1, 0.9}, {1, 2, 1, 0.9}, {2, 3, 1, 0.9}});
  CHECK_FALSE(eda(t, Residual(t), 0, 3, {MetricKind::Ext, 1.0}, 2));
  CHECK(eda(t, Residual(t), 0, 3, {MetricKind::Ext, 1.0}, 3));
  Residual r(t);
  r.block_edge(1);
  CHECK_FALSE(eda(t, r, 0, 3, {MetricKind::Ext, 1.0}));
}

TEST_CASE("eda on appendix example 1 picks the red path") {
  using namespace fixture_node;
  const Fixture f = fixture_appendix(1);
  const auto r = eda(f.topology, Residual(f.topology), f.source, f.destination, {MetricKind::Ext, 1.0});
  REQUIRE(r);
  CHECK(r->path.nodes == std::vector<NodeId>{S, A, B, T});
  CHECK(r->path.width == 3);
}

TEST_CASE("eda matches brute force on random graphs") {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    const int n = 4 + static_cast<int>(seed % 7);
    const Topology t = support::random_graph(seed, n, 0.35);
    const int hm = 1 + static_cast<int>(seed % 4);
    const double q = seed % 2 ? 0.9 : 1.0;
    const auto want = oracle::best_ext(t, 0, n - 1, q, hm);
    const auto got = eda(t, Residual(t), 0, n - 1, {MetricKind::Ext, q}, hm);
    if (want.value <= 0.0) {
      CHECK_FALSE(got);
      continue;
    }
    REQUIRE(got);
    CHECK(std::abs(got->score.primary - want.value) < 1e-9);
    CHECK(got->path.hops() <= hm);
    CHECK(got->path.width == oracle::static_width(t, got->path.nodes));
  }
}

TEST_CASE("eda with sum distance is dijkstra") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const int n = 5 + static_cast<int>(seed % 20);
    const Topology t = support::random_graph(seed + 1000, n, 0.2, 3, 50, 50);
    const auto got = eda(t, Residual::static_widths(t), 0, n - 1, {MetricKind::SumDist, 1.0});
    REQUIRE(got);
    CHECK(-got->score.primary == doctest::Approx(oracle::shortest_distance(t, 0, n - 1)));
  }
}

TEST_CASE("yen returns all simple paths of a small graph in cost order") {
  // Diamond 0-{1,2}-3 plus chord 1-2.
  const Topology t = make_graph({9, 9, 9, 9}, {{0, 1, 2, 0.9, 1.0},
                                                {0, 2, 2, 0.8, 2.5},
                                                {1, 3, 2, 0.7, 3.0},
                                                {2, 3, 2, 0.95, 1.0},
                                                {1, 2, 2, 0.6, 0.5}});
  const auto all = oracle::simple_paths(t, 0, 3, 10);
  std::vector<std::pair<double, std::vector<NodeId>>> want;
  for (const auto& p : all) want.push_back({oracle::path_length(t, p), p});
  std::sort(want.begin(), want.end());
  const auto got = yen_k_shortest(t, 0, 3, 25, {MetricKind::SumDist, 1.0});
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].path.nodes == want[i].second);
    CHECK(got[i].path.width == 2);
  }
  const auto cr = yen_k_shortest(t, 0, 3, 25, {MetricKind::CreationRate, 1.0});
  for (std::size_t i = 1; i < cr.size(); ++i)
    CHECK(oracle::path_cr(t, cr[i - 1].path.nodes) <= oracle::path_cr(t, cr[i].path.nodes));
}

TEST_CASE("yen with two routes and with L=1") {
  const Topology t = make_graph({9, 9, 9, 9}, {{0, 1, 1, 0.9, 1.0}, {1, 3, 1, 0.9, 1.0}, {0, 2, 1, 0.9, 2.0}, {2, 3, 1, 0.9, 2.0}});
  const auto both = yen_k_shortest(t, 0, 3, 25, {MetricKind::SumDist, 1.0});
  REQUIRE(both.size() == 2);
  CHECK(both[0].path.nodes == std::vector<NodeId>{0, 1, 3});
  CHECK(both[1].path.nodes == std::vector<NodeId>{0, 2, 3});
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Topology g = support::random_graph(seed + 77, 12, 0.25);
    const auto one = yen_k_shortest(g, 0, 11, 1, {MetricKind::SumDist, 1.0});
    REQUIRE(one.size() == 1);
    CHECK(oracle::path_length(g, one[0].path.nodes) == doctest::Approx(oracle::shortest_distance(g, 0, 11)));
  }
}

int channel_width(const Topology& g, const std::vector<NodeId>& p) {
  int w = 1 << 20;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) w = std::min(w, g.edge(*g.edge_between(p[i], p[i + 1])).width());
  return w;
}

TEST_CASE("yen paths are simple, distinct and ordered on random graphs") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Topology g = support::random_graph(seed + 500, 9, 0.4);
    const MetricEvaluator eval{MetricKind::Ext, 0.9};
    const auto got = yen_k_shortest(g, 0, 8, 25, eval);
    std::set<std::vector<NodeId>> distinct;
    for (std::size_t i = 0; i < got.size(); ++i) {
      const auto& nodes = got[i].path.nodes;
      CHECK(std::set<NodeId>(nodes.begin(), nodes.end()).size() == nodes.size());
      CHECK(distinct.insert(nodes).second);
      if (i > 0) CHECK(got[i - 1].score >= got[i].score);
    }
    // Each score matches a recomputation; the first path is the global best.
    std::vector<double> all;
    for (const auto& p : oracle::simple_paths(g, 0, 8, 100)) {
      const int width = channel_width(g, p);
      if (width > 0) all.push_back(oracle::expected_ebits(oracle::rates_of(g, p), width, 0.9));
    }
    if (all.empty()) {
      CHECK(got.empty());
      continue;
    }
    for (const auto& f : got) {
      const int width = channel_width(g, f.path.nodes);
      CHECK(f.path.width == width);
      CHECK(std::abs(f.score.primary - oracle::expected_ebits(oracle::rates_of(g, f.path.nodes), width, 0.9)) < 1e-12);
    }
    REQUIRE_FALSE(got.empty());
    CHECK(std::abs(got[0].score.primary - *std::max_element(all.begin(), all.end())) < 1e-12);
    CHECK(got.size() <= std::min<std::size_t>(25, all.size()));

    // With an additive metric the sequence is the exact length ranking.
    const auto by_length = yen_k_shortest(g, 0, 8, 25, {MetricKind::SumDist, 1.0});
    std::vector<double> lengths;
    for (const auto& p : oracle::simple_paths(g, 0, 8, 100))
      if (channel_width(g, p) > 0) lengths.push_back(oracle::path_length(g, p));
    std::sort(lengths.begin(), lengths.end());
    REQUIRE(by_length.size() == std::min<std::size_t>(25, lengths.size()));
    for (std::size_t i = 0; i < by_length.size(); ++i)
      CHECK(oracle::path_length(g, by_length[i].path.nodes) == doctest::Approx(lengths[i]).epsilon(1e-12));
  }
}

TEST_CASE("g-eda on appendix example 1 keeps only the red path") {
  using namespace fixture_node;
  const Fixture f = fixture_appendix(1);
  Residual r(f.topology);
  const SdPair pair{f.source, f.destination};
  const auto sel = greedy_eda(f.topology, r, std::span(&pair, 1), {MetricKind::Ext, 1.0}, kNoHopLimit);
  REQUIRE(sel.size() == 1);
  CHECK(sel[0].path.nodes == std::vector<NodeId>{S, A, B, T});
  CHECK(sel[0].path.width == 3);
  CHECK(max_flow_width(f.topology, Residual(f.topology), f.source, f.destination) == 6);
}

TEST_CASE("g-eda on appendix example 2 starts with the red (2,3)-path") {
  using namespace fixture_node;
  const Fixture f = fixture_appendix(2);
  Residual r(f.topology);
  const SdPair pair{f.source, f.destination};
  const auto sel = greedy_eda(f.topology, r, std::span(&pair, 1), {MetricKind::Ext, 1.0}, kNoHopLimit);
  REQUIRE_FALSE(sel.empty());
  CHECK(sel[0].path.nodes == std::vector<NodeId>{S, A, B, T});
  CHECK(sel[0].path.width == 2);
  const std::vector<double> red(3, 0.6), green(4, 0.6);
  const double singles = oracle::expected_ebits(red, 1, 1.0) + 2 * oracle::expected_ebits(green, 1, 1.0);
  CHECK(singles == doctest::Approx(0.4752));
  CHECK(sel[0].score.primary == doctest::Approx(0.63936));
  CHECK(sel[0].score.primary > singles);
}

TEST_CASE("g-eda reservations stay within capacity and respect K_m") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Topology g = support::random_graph(seed + 900, 12, 0.3, 4, 2, 6);
    Residual r(g);
    const std::vector<SdPair> pairs{{0, 11}, {3, 7}, {5, 9}};
    const auto sel = greedy_eda(g, r, pairs, {MetricKind::Ext, 0.9}, 5, 4);
    CHECK(sel.size() <= 4);
    std::vector<ChannelId> bound;
    for (const auto& s : sel)
      for (const auto& hop : s.channels) bound.insert(bound.end(), hop.begin(), hop.end());
    CHECK(oracle::within_capacity(g, bound));
    for (const auto& s : sel) CHECK(s.path.hops() <= 5);
  }
}

TEST_CASE("max flow width agrees with an independent augmenting-path flow") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Topology g = support::random_graph(seed + 300, 8, 0.3);
    CHECK(max_flow_width(g, Residual(g), 0, 7) == oracle::max_flow(g, 0, 7));
  }
  const Topology line = make_graph({3, 6, 3}, {{0, 1, 3, 0.9}, {1, 2, 3, 0.9}});
  CHECK(max_flow_width(line, Residual(line), 0, 2) == 3);
  const Topology split = make_graph({3, 3, 3, 3}, {{0, 1, 3, 0.9}, {2, 3, 3, 0.9}});
  CHECK(max_flow_width(split, Residual(split), 0, 3) == 0);
}

TEST_CASE("hop bound calibration") {
  // Every path with EXT > 1 from this star-of-corridors has at most 3 hops.
  const Topology t = make_graph({8, 8, 8, 8, 8, 8}, {{0, 1, 4, 0.95}, {1, 2, 4, 0.95}, {2, 3, 4, 0.95},
                                                      {3, 4, 4, 0.3}, {4, 5, 4, 0.3}});
  int want = 2;
  for (NodeId a = 0; a < 6; ++a)
    for (NodeId b = a + 1; b < 6; ++b)
      for (const auto& p : oracle::simple_paths(t, a, b, 10))
        if (oracle::expected_ebits(oracle::rates_of(t, p), oracle::static_width(t, p), 0.9) > 1.0)
          want = std::max(want, static_cast<int>(p.size()) - 1);
  CHECK(want == 3);
  CHECK(calibrate_h_m(t, 0.9, 5) == want);
  CHECK(calibrate_h_m(t, 0.9, 5) == calibrate_h_m(t, 0.9, 5));
  const Topology single = make_graph({2, 2}, {{0, 1, 1, 0.5}});
  CHECK(calibrate_h_m(single, 0.9, 1) == kMinHopBound);
}

}
