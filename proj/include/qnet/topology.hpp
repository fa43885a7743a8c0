#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnet {

using NodeId = int;
using EdgeId = int;
using ChannelId = int;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

struct Node {
  NodeId id = 0;
  Point position;
  int qubit_capacity = 0;
};

struct Channel {
  ChannelId id = 0;
  NodeId u = 0;
  NodeId v = 0;
  EdgeId edge = 0;
  double length = 0.0;
  double success_rate = 1.0;
};

/// The set of parallel channels between one node pair. width() is the channel
/// multiplicity W of the edge.
struct Edge {
  EdgeId id = 0;
  NodeId u = 0;
  NodeId v = 0;
  double length = 0.0;
  double success_rate = 1.0;
  std::vector<ChannelId> channels;

  int width() const { return static_cast<int>(channels.size()); }
  NodeId other(NodeId x) const { return x == u ? v : u; }
};

struct Adjacency {
  NodeId neighbor;
  EdgeId edge;
};

/// Thrown when a generator cannot reach its calibration targets.
class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(const std::string& what, double achieved_degree, double achieved_rate)
      : std::runtime_error(what), achieved_degree(achieved_degree), achieved_rate(achieved_rate) {}
  double achieved_degree;
  double achieved_rate;
};

/// Quantum network multigraph: nodes with qubit capacities, edges grouping
/// parallel channels. Channel and edge ids are dense and assigned in insertion
/// order; adjacency lists are kept sorted by neighbor id.
class Topology {
 public:
  Topology() = default;
  Topology(std::vector<Node> nodes, double alpha);

  /// Adds an edge of `width` parallel channels of the given length. The
  /// success rate defaults to exp(-alpha * length).
  EdgeId add_edge(NodeId u, NodeId v, double length, int width,
                  std::optional<double> success_rate = std::nullopt);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int channel_count() const { return static_cast<int>(channels_.size()); }

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Channel>& channels() const { return channels_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  const Edge& edge(EdgeId id) const { return edges_.at(id); }
  const Channel& channel(ChannelId id) const { return channels_.at(id); }
  std::span<const Adjacency> neighbors(NodeId u) const { return adjacency_.at(u); }
  std::optional<EdgeId> edge_between(NodeId u, NodeId v) const;

  double alpha() const { return alpha_; }
  void set_qubit_capacity(NodeId u, int capacity);

  bool connected() const;
  double mean_degree() const;
  double mean_success_rate() const;

  friend bool operator==(const Topology& a, const Topology& b);

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<Channel> channels_;
  std::vector<std::vector<Adjacency>> adjacency_;
  double alpha_ = 0.0;
};

/// p_c = exp(-alpha * L), clamped to [0, 1]. Throws on negative inputs.
double channel_success_rate(double length, double alpha);

struct WaxmanParams {
  int n = 100;
  double target_degree = 6.0;
  double target_rate = 0.6;
  int qubit_min = 10;
  int qubit_max = 14;
  int width_min = 3;
  int width_max = 7;
  std::uint64_t seed = 1;
  double side = 100000.0;
  int max_retries = 100;
};

inline constexpr double kDegreeTolerance = 0.5;
inline constexpr double kRateTolerance = 0.01;

/// Random Waxman topology calibrated to the target mean degree and mean
/// channel success rate. Regenerates with seed+1 on failure.
Topology generate_waxman(const WaxmanParams& params);

/// Minimum pairwise node separation used by the generator.
double min_node_separation(int n, double side);

struct Fixture {
  Topology topology;
  NodeId source;
  NodeId destination;
  double swap_rate;
};

/// Node ids of the eight-node counterexample graph.
namespace fixture_node {
inline constexpr NodeId S = 0, A = 1, B = 2, C = 3, D = 4, E = 5, F = 6, T = 7;
}

/// The counterexample graph with the red (s,A,B,d), green (s,C,A,E,d) and
/// blue (s,D,B,F,d) routes. `example` selects the parameter set (1 or 2).
Fixture fixture_appendix(int example);

}  // namespace qnet
