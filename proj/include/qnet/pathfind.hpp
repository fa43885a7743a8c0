#pragma once

#include <climits>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qnet/metrics.hpp"

namespace qnet {

struct SdPair {
  NodeId source = 0;
  NodeId destination = 0;
  friend bool operator==(const SdPair&, const SdPair&) = default;
};

inline constexpr int kNoHopLimit = INT_MAX;
inline constexpr int kDefaultMaxPaths = 200;
inline constexpr int kDefaultYenCount = 25;

struct SearchLimits {
  int max_hops = kNoHopLimit;             // h_m
  int max_paths = kDefaultMaxPaths;       // K_m
  int yen_count = kDefaultYenCount;       // L
};

struct FoundPath {
  Path path;
  PathScore score;
};

/// Extended Dijkstra: best path from src to dst under `eval` among paths of at
/// most `max_hops` hops that have positive width in `residual`. The returned
/// width is path_width() of the result.
std::optional<FoundPath> eda(const Topology& topo, const Residual& residual, NodeId src, NodeId dst,
                             const MetricEvaluator& eval, int max_hops = kNoHopLimit);

/// Yen's k shortest loop-free paths on the static topology (qubit capacities
/// ignored), best first. Widths are static bottleneck edge widths.
std::vector<FoundPath> yen_k_shortest(const Topology& topo, NodeId src, NodeId dst, int count,
                                      const MetricEvaluator& eval, int max_hops = kNoHopLimit);

struct SelectedPath {
  Path path;
  int pair = 0;
  PathScore score;
  std::vector<std::vector<ChannelId>> channels;
};

/// Greedy EDA: repeatedly runs EDA for every pair on the residual, reserves
/// the globally best path, and stops when nothing has positive width or
/// `max_paths` paths are selected. `boost` (optional, one factor per pair)
/// scales each pair's scores.
std::vector<SelectedPath> greedy_eda(const Topology& topo, Residual& residual,
                                     std::span<const SdPair> pairs, const MetricEvaluator& eval,
                                     int max_hops, int max_paths = kDefaultMaxPaths,
                                     std::span<const double> boost = {});

/// Hop bound h_m: the largest hop count among G-EDA paths with EXT > 1 over
/// `sample_pairs` random pairs, floored at 2.
int calibrate_h_m(const Topology& topo, double swap_rate, std::uint64_t seed, int sample_pairs = 100);

inline constexpr int kMinHopBound = 2;

/// Maximum total width reservable at once between src and dst: endpoints
/// pay W qubits, intermediates 2W, each edge carries at most its free channels.
int max_flow_width(const Topology& topo, const Residual& residual, NodeId src, NodeId dst);

}  // namespace qnet
