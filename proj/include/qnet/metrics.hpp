#pragma once

#include <compare>
#include <span>
#include <vector>

#include "qnet/topology.hpp"

namespace qnet {

/// Node sequence v_0..v_h plus width W, i.e. a (W,h)-path.
struct Path {
  std::vector<NodeId> nodes;
  int width = 0;

  int hops() const { return nodes.empty() ? 0 : static_cast<int>(nodes.size()) - 1; }
  NodeId source() const { return nodes.front(); }
  NodeId destination() const { return nodes.back(); }
  friend bool operator==(const Path&, const Path&) = default;
};

/// Per-hop success rates of a path; throws if consecutive nodes share no edge.
std::vector<double> hop_rates(const Topology& topo, std::span<const NodeId> nodes);
std::vector<EdgeId> hop_edges(const Topology& topo, std::span<const NodeId> nodes);

/// Probability that a width-W path with the given per-hop channel success
/// rates is exactly an i-entangled path after P2, for i = 0..W.
std::vector<double> ext_distribution(std::span<const double> per_hop_rates, int width);

/// Expected number of ebits: q^h * sum_i i * P_h^i.
double ext(std::span<const double> per_hop_rates, int width, double swap_rate);
double ext(const Topology& topo, const Path& path, double swap_rate);

/// Incremental form of the P_k^i recursion. Extending by one hop costs O(W)
/// and reuses the prefix distribution.
class ExtPrefix {
 public:
  explicit ExtPrefix(int width);

  void extend(double rate);
  int width() const { return static_cast<int>(dist_.size()) - 1; }
  int hops() const { return hops_; }
  /// Entry i is P_k^i for the current prefix of k hops (entry 0 included).
  const std::vector<double>& distribution() const { return dist_; }
  double expected_width() const;

 private:
  std::vector<double> dist_;
  int hops_ = 0;
};

/// Binomial(W, p) probabilities Q^0..Q^W, with coefficients built incrementally.
std::vector<double> hop_count_distribution(int width, double rate);

double sum_dist(const Topology& topo, const Path& path);

/// Sum of 1/p_i over hops; +infinity if any hop has p = 0.
double creation_rate(const Topology& topo, const Path& path);

/// BotCap cost: wider first, then lower creation rate. Smaller is better.
struct BotCapCost {
  int neg_width;
  double creation_rate;
  friend auto operator<=>(const BotCapCost&, const BotCapCost&) = default;
};
BotCapCost bot_cap(const Topology& topo, const Path& path);

enum class MetricKind { Ext, SumDist, CreationRate, BotCap };

const char* to_string(MetricKind kind);
MetricKind metric_from_string(const std::string& name);

/// A path-quality evaluation function. Scores are oriented so that larger is
/// better for every kind.
struct MetricEvaluator {
  MetricKind kind = MetricKind::Ext;
  double swap_rate = 1.0;
};

struct PathScore {
  double primary = 0.0;
  double secondary = 0.0;
  friend auto operator<=>(const PathScore&, const PathScore&) = default;
};

PathScore score_path(const MetricEvaluator& eval, const Topology& topo, const Path& path);

/// Raises a score by `factor` >= 1: EXT and width are multiplied, costs divided.
PathScore boost_score(const PathScore& score, MetricKind kind, double factor);

/// Free resources in the current slot: qubits per node, unbound channels per edge.
class Residual {
 public:
  static constexpr int kUnlimited = 1 << 28;

  Residual() = default;
  explicit Residual(const Topology& topo);
  /// Ignores qubit capacities; only channel multiplicities constrain widths.
  static Residual static_widths(const Topology& topo);

  int free_qubits(NodeId u) const { return qubits_[u]; }
  int free_channels(EdgeId e) const { return channels_[e]; }
  bool is_bound(ChannelId c) const { return bound_[c] != 0; }

  void block_node(NodeId u) { qubits_[u] = 0; }
  void block_edge(EdgeId e) { channels_[e] = 0; }
  void set_free_qubits(NodeId u, int q) { qubits_[u] = q; }

  /// Reserves the path at `width`: both endpoints of every hop lose `width`
  /// qubits and the lowest-id unbound channels are bound. Returns the bound
  /// channel ids per hop. Throws std::logic_error if infeasible.
  std::vector<std::vector<ChannelId>> reserve(const Topology& topo, std::span<const NodeId> nodes,
                                              int width);

 private:
  std::vector<int> qubits_;
  std::vector<int> channels_;
  std::vector<char> bound_;
};

/// Largest W such that every hop has W free channels, the two endpoints have
/// W free qubits and every intermediate node has 2W. Returns 0 if none.
int path_width(const Topology& topo, const Residual& residual, std::span<const NodeId> nodes);

}  // namespace qnet
