#include "qnet/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "qnet/rng.hpp"

namespace qnet {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Topology::Topology(std::vector<Node> nodes, double alpha)
    : nodes_(std::move(nodes)), adjacency_(nodes_.size()), alpha_(alpha) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id != static_cast<NodeId>(i)) throw std::invalid_argument("node ids must be dense");
    if (nodes_[i].qubit_capacity < 0) throw std::invalid_argument("negative qubit capacity");
  }
  if (alpha < 0) throw std::invalid_argument("negative alpha");
}

EdgeId Topology::add_edge(NodeId u, NodeId v, double length, int width,
                          std::optional<double> success_rate) {
  if (u == v) throw std::invalid_argument("self loop");
  if (u < 0 || v < 0 || u >= node_count() || v >= node_count())
    throw std::invalid_argument("edge endpoint out of range");
  if (width < 1) throw std::invalid_argument("edge width must be positive");
  if (edge_between(u, v)) throw std::invalid_argument("duplicate edge");
  const double p = success_rate ? *success_rate : channel_success_rate(length, alpha_);
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("success rate outside [0,1]");

  Edge e;
  e.id = edge_count();
  e.u = std::min(u, v);
  e.v = std::max(u, v);
  e.length = length;
  e.success_rate = p;
  for (int i = 0; i < width; ++i) {
    Channel c{channel_count(), e.u, e.v, e.id, length, p};
    e.channels.push_back(c.id);
    channels_.push_back(c);
  }
  auto insert_sorted = [](std::vector<Adjacency>& list, Adjacency a) {
    auto it = std::lower_bound(list.begin(), list.end(), a.neighbor,
                               [](const Adjacency& x, NodeId n) { return x.neighbor < n; });
    list.insert(it, a);
  };
  insert_sorted(adjacency_[u], {v, e.id});
  insert_sorted(adjacency_[v], {u, e.id});
  edges_.push_back(std::move(e));
  return edges_.back().id;
}

std::optional<EdgeId> Topology::edge_between(NodeId u, NodeId v) const {
  const auto& list = adjacency_.at(u);
  auto it = std::lower_bound(list.begin(), list.end(), v,
                             [](const Adjacency& x, NodeId n) { return x.neighbor < n; });
  if (it != list.end() && it->neighbor == v) return it->edge;
  return std::nullopt;
}

void Topology::set_qubit_capacity(NodeId u, int capacity) {
  if (capacity < 0) throw std::invalid_argument("negative qubit capacity");
  nodes_.at(u).qubit_capacity = capacity;
}

bool Topology::connected() const {
  if (nodes_.empty()) return true;
  std::vector<char> seen(nodes_.size(), 0);
  std::queue<NodeId> frontier;
  frontier.push(0);
  seen[0] = 1;
  int count = 1;
  while (!frontier.empty()) {
    NodeId u = frontier.front();
    frontier.pop();
    for (const auto& a : adjacency_[u]) {
      if (!seen[a.neighbor]) {
        seen[a.neighbor] = 1;
        ++count;
        frontier.push(a.neighbor);
      }
    }
  }
  return count == node_count();
}

double Topology::mean_degree() const {
  if (nodes_.empty()) return 0.0;
  return 2.0 * edge_count() / node_count();
}

double Topology::mean_success_rate() const {
  if (channels_.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& c : channels_) sum += c.success_rate;
  return sum / channel_count();
}

bool operator==(const Topology& a, const Topology& b) {
  auto node_eq = [](const Node& x, const Node& y) {
    return x.id == y.id && x.position.x == y.position.x && x.position.y == y.position.y &&
           x.qubit_capacity == y.qubit_capacity;
  };
  auto chan_eq = [](const Channel& x, const Channel& y) {
    return x.id == y.id && x.u == y.u && x.v == y.v && x.edge == y.edge && x.length == y.length &&
           x.success_rate == y.success_rate;
  };
  return a.alpha_ == b.alpha_ &&
         std::equal(a.nodes_.begin(), a.nodes_.end(), b.nodes_.begin(), b.nodes_.end(), node_eq) &&
         std::equal(a.channels_.begin(), a.channels_.end(), b.channels_.begin(), b.channels_.end(),
                    chan_eq);
}

double channel_success_rate(double length, double alpha) {
  if (length < 0) throw std::invalid_argument("negative channel length");
  if (alpha < 0) throw std::invalid_argument("negative alpha");
  return std::clamp(std::exp(-alpha * length), 0.0, 1.0);
}

double min_node_separation(int n, double side) { return 0.5 * side / std::sqrt(static_cast<double>(n)); }

namespace {

constexpr int kPlacementTries = 20000;
constexpr int kDegreeIterations = 40;
constexpr int kAlphaIterations = 60;
constexpr double kBetaLo = 1e-4, kBetaHi = 1.0;
constexpr double kAlphaLo = 1e-8, kAlphaHi = 10.0;

struct Attempt {
  std::optional<Topology> topology;
  double degree = 0.0;
  double rate = 0.0;
  std::string failure;
};

std::optional<std::vector<Point>> place_nodes(const WaxmanParams& p, std::uint64_t seed) {
  Rng rng(seed, {static_cast<std::uint64_t>(Stream::Placement)});
  const double sep = min_node_separation(p.n, p.side);
  std::vector<Point> pts;
  pts.reserve(p.n);
  for (int i = 0; i < p.n; ++i) {
    bool placed = false;
    for (int t = 0; t < kPlacementTries && !placed; ++t) {
      Point c{rng.uniform(0.0, p.side), rng.uniform(0.0, p.side)};
      placed = std::all_of(pts.begin(), pts.end(), [&](Point q) { return distance(c, q) >= sep; });
      if (placed) pts.push_back(c);
    }
    if (!placed) return std::nullopt;
  }
  return pts;
}

struct Candidate {
  int u, v;
  double length;
  double weight;   // exp(-d / (0.2 D))
  double uniform;  // fixed draw; the edge exists iff uniform < beta * weight
};

int edge_count_at(const std::vector<Candidate>& cands, double beta) {
  int m = 0;
  for (const auto& c : cands) m += c.uniform < beta * c.weight;
  return m;
}

bool connected_with(int n, const std::vector<Candidate>& cands, double beta) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = n;
  for (const auto& c : cands) {
    if (!(c.uniform < beta * c.weight)) continue;
    int a = find(c.u), b = find(c.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

double mean_rate(const std::vector<double>& lengths, const std::vector<int>& widths, double alpha) {
  double sum = 0.0;
  long count = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    sum += widths[i] * channel_success_rate(lengths[i], alpha);
    count += widths[i];
  }
  return count ? sum / count : 0.0;
}

Attempt try_generate(const WaxmanParams& p, std::uint64_t seed) {
  Attempt out;
  auto pts = place_nodes(p, seed);
  if (!pts) {
    out.failure = "node placement failed";
    return out;
  }
  const double diag = p.side * std::sqrt(2.0);
  Rng edge_rng(seed, {static_cast<std::uint64_t>(Stream::EdgeDraw)});
  std::vector<Candidate> cands;
  cands.reserve(static_cast<std::size_t>(p.n) * (p.n - 1) / 2);
  for (int u = 0; u < p.n; ++u) {
    for (int v = u + 1; v < p.n; ++v) {
      double d = distance((*pts)[u], (*pts)[v]);
      cands.push_back({u, v, d, std::exp(-d / (0.2 * diag)), edge_rng.uniform()});
    }
  }

  auto degree_at = [&](double beta) { return 2.0 * edge_count_at(cands, beta) / p.n; };
  double lo = kBetaLo, hi = kBetaHi;
  std::optional<double> beta;
  if (std::abs(degree_at(hi) - p.target_degree) <= kDegreeTolerance) beta = hi;
  for (int it = 0; it < kDegreeIterations && !beta; ++it) {
    double mid = 0.5 * (lo + hi);
    double deg = degree_at(mid);
    if (deg < p.target_degree - kDegreeTolerance)
      lo = mid;
    else if (deg > p.target_degree + kDegreeTolerance)
      hi = mid;
    else
      beta = mid;
  }
  out.degree = degree_at(beta.value_or(hi));
  if (!beta) {
    out.failure = "degree calibration failed";
    return out;
  }
  if (!connected_with(p.n, cands, *beta)) {
    out.failure = "disconnected";
    return out;
  }

  std::vector<const Candidate*> chosen;
  for (const auto& c : cands)
    if (c.uniform < *beta * c.weight) chosen.push_back(&c);

  Rng width_rng(seed, {static_cast<std::uint64_t>(Stream::EdgeWidth)});
  std::vector<double> lengths;
  std::vector<int> widths;
  for (const auto* c : chosen) {
    lengths.push_back(c->length);
    widths.push_back(static_cast<int>(width_rng.uniform_int(p.width_min, p.width_max)));
  }

  double alo = kAlphaLo, ahi = kAlphaHi;
  for (int it = 0; it < kAlphaIterations; ++it) {
    double mid = 0.5 * (alo + ahi);
    // mean rate decreases with alpha
    if (mean_rate(lengths, widths, mid) > p.target_rate)
      alo = mid;
    else
      ahi = mid;
  }
  const double alpha = 0.5 * (alo + ahi);
  out.rate = mean_rate(lengths, widths, alpha);
  if (std::abs(out.rate - p.target_rate) > kRateTolerance) {
    out.failure = "success-rate calibration failed";
    return out;
  }

  Rng cap_rng(seed, {static_cast<std::uint64_t>(Stream::Capacity)});
  std::vector<Node> nodes;
  for (int i = 0; i < p.n; ++i)
    nodes.push_back({i, (*pts)[i], static_cast<int>(cap_rng.uniform_int(p.qubit_min, p.qubit_max))});
  Topology topo(std::move(nodes), alpha);
  for (std::size_t i = 0; i < chosen.size(); ++i)
    topo.add_edge(chosen[i]->u, chosen[i]->v, chosen[i]->length, widths[i]);
  out.topology = std::move(topo);
  return out;
}

}  // namespace

Topology generate_waxman(const WaxmanParams& p) {
  if (p.n < 2) throw std::invalid_argument("n must be at least 2");
  if (p.target_degree < 1) throw std::invalid_argument("target degree must be at least 1");
  if (!(p.target_rate > 0 && p.target_rate < 1)) throw std::invalid_argument("target rate must be in (0,1)");
  if (p.qubit_min < 0 || p.qubit_max < p.qubit_min) throw std::invalid_argument("bad qubit range");
  if (p.width_min < 1 || p.width_max < p.width_min) throw std::invalid_argument("bad width range");

  Attempt best;
  double best_err = INFINITY;
  for (int attempt = 0; attempt <= p.max_retries; ++attempt) {
    Attempt a = try_generate(p, p.seed + static_cast<std::uint64_t>(attempt));
    if (a.topology) return std::move(*a.topology);
    double err = std::abs(a.degree - p.target_degree) + std::abs(a.rate - p.target_rate);
    if (err < best_err) {
      best_err = err;
      best = std::move(a);
    }
  }
  throw CalibrationError("topology generation failed after retries: " + best.failure, best.degree,
                         best.rate);
}

Fixture fixture_appendix(int example) {
  using namespace fixture_node;
  if (example != 1 && example != 2) throw std::invalid_argument("fixture example must be 1 or 2");
  // Intermediate capacities are doubled relative to the published figure so
  // that a width-W transit costs 2W qubits.
  const int end_cap = example == 1 ? 6 : 3;
  const int mid_cap = example == 1 ? 6 : 4;
  const double p = example == 1 ? 0.99 : 0.6;
  const int red_w = example == 1 ? 3 : 2;
  const int other_w = example == 1 ? 3 : 1;

  const Point pos[8] = {{0, 2}, {2, 3}, {4, 1}, {1, 4}, {1, 0}, {4, 4}, {5, 0}, {6, 2}};
  std::vector<Node> nodes;
  for (int i = 0; i < 8; ++i) nodes.push_back({i, pos[i], (i == S || i == T) ? end_cap : mid_cap});
  Topology topo(std::move(nodes), 0.0);
  auto add = [&](NodeId u, NodeId v, int w) {
    topo.add_edge(u, v, distance(topo.node(u).position, topo.node(v).position), w, p);
  };
  add(S, A, red_w);
  add(A, B, red_w);
  add(B, T, red_w);
  add(S, C, other_w);
  add(C, A, other_w);
  add(A, E, other_w);
  add(E, T, other_w);
  add(S, D, other_w);
  add(D, B, other_w);
  add(B, F, other_w);
  add(F, T, other_w);
  return {std::move(topo), S, T, 1.0};
}

}  // namespace qnet
