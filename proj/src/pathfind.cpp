#include "qnet/pathfind.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/push_relabel_max_flow.hpp>

#include "qnet/rng.hpp"

namespace qnet {

namespace {

// One search label: a walk from the source ending at `node`, evaluated at a
// fixed width `stratum`. For EXT the label also owns `stratum` tail
// probabilities T(i) = P(every hop so far has >= i successful links).
struct Label {
  NodeId node;
  int parent;
  int hops;
  int stratum;
  PathScore score;
  double cost;  // additive cost (SumDist / CR) or CR tie-break for BotCap
  int tail_offset;
  bool alive;
};

class ExtendedDijkstra {
 public:
  ExtendedDijkstra(const Topology& topo, const Residual& residual, NodeId src, NodeId dst,
                   const MetricEvaluator& eval, int max_hops)
      : topo_(topo), res_(residual), src_(src), dst_(dst), eval_(eval), max_hops_(max_hops) {
    bounded_ = max_hops_ < topo_.node_count();
  }

  std::optional<FoundPath> run() {
    if (src_ == dst_) throw std::invalid_argument("EDA requires src != dst");
    if (max_hops_ < 1) return std::nullopt;
    int top = std::min(res_.free_qubits(src_), res_.free_qubits(dst_));
    int max_edge = 0;
    for (EdgeId e = 0; e < topo_.edge_count(); ++e) max_edge = std::max(max_edge, res_.free_channels(e));
    top = std::min(top, max_edge);
    if (top < 1) return std::nullopt;

    const bool width_sensitive = eval_.kind == MetricKind::Ext || eval_.kind == MetricKind::BotCap;
    strata_ = width_sensitive ? top : 1;
    live_.assign(static_cast<std::size_t>(topo_.node_count()) * strata_, {});
    if (eval_.kind == MetricKind::Ext)
      tail_cache_.assign(static_cast<std::size_t>(topo_.edge_count()) * (strata_ + 1), -1);

    for (int w = 1; w <= strata_; ++w) {
      Label l{src_, -1, 0, w, {}, 0.0, -1, true};
      if (eval_.kind == MetricKind::Ext) {
        l.tail_offset = static_cast<int>(pool_.size());
        pool_.insert(pool_.end(), w, 1.0);
        l.score = {static_cast<double>(w), 0.0};
      } else {
        l.score = score_of(w, 0.0);
      }
      push(std::move(l));
    }

    while (!heap_.empty()) {
      int idx = heap_.top();
      std::pop_heap(heap_.c.begin(), heap_.c.end(), heap_.comp);
      heap_.c.pop_back();
      const Label cur = labels_[idx];
      if (!cur.alive) continue;
      if (cur.node == dst_) return finish(idx);
      if (cur.hops + 1 > max_hops_) continue;
      const int w = cur.stratum;
      if (cur.node != src_ && res_.free_qubits(cur.node) < 2 * w) continue;
      for (const auto& adj : topo_.neighbors(cur.node)) {
        const NodeId v = adj.neighbor;
        if (v == src_) continue;
        if (res_.free_channels(adj.edge) < w) continue;
        if (res_.free_qubits(v) < (v == dst_ ? w : 2 * w)) continue;
        extend(idx, adj.edge, v);
      }
    }
    return std::nullopt;
  }

 private:
  struct Compare {
    const ExtendedDijkstra* self;
    // True when a ranks below b (max-heap on quality).
    bool operator()(int a, int b) const { return self->better(b, a); }
  };

  PathScore score_of(int stratum, double cost) const {
    switch (eval_.kind) {
      case MetricKind::SumDist:
      case MetricKind::CreationRate: return {-cost, 0.0};
      case MetricKind::BotCap: return {static_cast<double>(stratum), -cost};
      case MetricKind::Ext: break;
    }
    return {};
  }

  std::vector<NodeId> nodes_of(int idx) const {
    std::vector<NodeId> seq;
    for (int i = idx; i >= 0; i = labels_[i].parent) seq.push_back(labels_[i].node);
    std::reverse(seq.begin(), seq.end());
    return seq;
  }

  bool better(int a, int b) const {
    const Label& la = labels_[a];
    const Label& lb = labels_[b];
    if (la.score != lb.score) return la.score > lb.score;
    if (la.hops != lb.hops) return la.hops < lb.hops;
    if (a == b) return false;
    auto sa = nodes_of(a), sb = nodes_of(b);
    if (sa != sb) return sa < sb;
    if (la.stratum != lb.stratum) return la.stratum > lb.stratum;
    return a < b;
  }

  const double* tails(EdgeId e, int w) {
    int& off = tail_cache_[static_cast<std::size_t>(e) * (strata_ + 1) + w];
    if (off < 0) {
      auto q = hop_count_distribution(w, topo_.edge(e).success_rate);
      off = static_cast<int>(edge_tails_.size());
      edge_tails_.resize(edge_tails_.size() + w);
      double acc = 0.0;
      for (int i = w; i >= 1; --i) {
        acc += q[i];
        edge_tails_[off + i - 1] = std::min(acc, 1.0);
      }
    }
    return edge_tails_.data() + off;
  }

  // a dominates b (same node and stratum) if every completion of b is matched
  // by a. For EXT this is dominance of q^h-scaled cumulative tail sums.
  bool dominates(const Label& a, const Label& b) const {
    if (bounded_ && a.hops > b.hops) return false;
    if (eval_.kind != MetricKind::Ext) return a.cost <= b.cost;
    const double sa = std::pow(eval_.swap_rate, a.hops), sb = std::pow(eval_.swap_rate, b.hops);
    double ca = 0.0, cb = 0.0;
    for (int i = 0; i < a.stratum; ++i) {
      ca += pool_[a.tail_offset + i];
      cb += pool_[b.tail_offset + i];
      if (sa * ca < sb * cb) return false;
    }
    return true;
  }

  void extend(int parent_idx, EdgeId e, NodeId v) {
    const Label& p = labels_[parent_idx];
    Label l{v, parent_idx, p.hops + 1, p.stratum, {}, 0.0, -1, true};
    const double rate = topo_.edge(e).success_rate;
    if (eval_.kind == MetricKind::Ext) {
      const double* t = tails(e, p.stratum);
      const int off = static_cast<int>(pool_.size());
      double sum = 0.0;
      pool_.resize(pool_.size() + p.stratum);
      const Label& pp = labels_[parent_idx];
      for (int i = 0; i < pp.stratum; ++i) {
        pool_[off + i] = pool_[pp.tail_offset + i] * t[i];
        sum += pool_[off + i];
      }
      const double value = std::pow(eval_.swap_rate, l.hops) * sum;
      if (!(value > 0.0)) {
        pool_.resize(off);
        return;
      }
      l.tail_offset = off;
      l.score = {value, 0.0};
    } else {
      double step = 0.0;
      if (eval_.kind == MetricKind::SumDist) {
        step = topo_.edge(e).length;
      } else {
        if (rate <= 0.0) return;
        step = 1.0 / rate;
      }
      l.cost = p.cost + step;
      l.score = score_of(p.stratum, l.cost);
    }

    auto& bucket = live_[static_cast<std::size_t>(v) * strata_ + (l.stratum - 1)];
    for (int other : bucket)
      if (dominates(labels_[other], l)) {
        if (eval_.kind == MetricKind::Ext) pool_.resize(l.tail_offset);
        return;
      }
    std::erase_if(bucket, [&](int other) {
      if (dominates(l, labels_[other])) {
        labels_[other].alive = false;
        return true;
      }
      return false;
    });
    push(std::move(l));
  }

  void push(Label l) {
    const int idx = static_cast<int>(labels_.size());
    const std::size_t slot = static_cast<std::size_t>(l.node) * strata_ + (l.stratum - 1);
    labels_.push_back(std::move(l));
    if (labels_[idx].node != src_) live_[slot].push_back(idx);
    heap_.c.push_back(idx);
    std::push_heap(heap_.c.begin(), heap_.c.end(), heap_.comp);
  }

  FoundPath finish(int idx) const {
    Path path{nodes_of(idx), 0};
    path.width = path_width(topo_, res_, path.nodes);
    return {path, score_path(eval_, topo_, path)};
  }

  struct Heap {
    std::vector<int> c;
    Compare comp;
    bool empty() const { return c.empty(); }
    int top() const { return c.front(); }
  };

  const Topology& topo_;
  const Residual& res_;
  NodeId src_, dst_;
  MetricEvaluator eval_;
  int max_hops_;
  bool bounded_ = false;
  int strata_ = 1;
  std::vector<Label> labels_;
  std::vector<double> pool_;
  std::vector<double> edge_tails_;
  std::vector<int> tail_cache_;
  std::vector<std::vector<int>> live_;
  Heap heap_{{}, Compare{this}};
};

int static_width(const Topology& topo, std::span<const NodeId> nodes) {
  int w = INT_MAX;
  for (EdgeId e : hop_edges(topo, nodes)) w = std::min(w, topo.edge(e).width());
  return w;
}

bool better_found(const FoundPath& a, const FoundPath& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.path.nodes < b.path.nodes;
}

}  // namespace

std::optional<FoundPath> eda(const Topology& topo, const Residual& residual, NodeId src, NodeId dst,
                             const MetricEvaluator& eval, int max_hops) {
  return ExtendedDijkstra(topo, residual, src, dst, eval, max_hops).run();
}

std::vector<FoundPath> yen_k_shortest(const Topology& topo, NodeId src, NodeId dst, int count,
                                      const MetricEvaluator& eval, int max_hops) {
  if (src == dst) throw std::invalid_argument("Yen requires src != dst");
  std::vector<FoundPath> accepted;
  if (count < 1) return accepted;
  const Residual base = Residual::static_widths(topo);

  auto finalize = [&](std::vector<NodeId> nodes) {
    Path p{std::move(nodes), 0};
    p.width = static_width(topo, p.nodes);
    return FoundPath{p, score_path(eval, topo, p)};
  };

  auto first = eda(topo, base, src, dst, eval, max_hops);
  if (!first) return accepted;
  accepted.push_back(finalize(first->path.nodes));

  std::vector<FoundPath> candidates;
  std::set<std::vector<NodeId>> seen{accepted.front().path.nodes};

  while (static_cast<int>(accepted.size()) < count) {
    const std::vector<NodeId> prev = accepted.back().path.nodes;
    for (std::size_t i = 0; i + 1 < prev.size(); ++i) {
      const int root_hops = static_cast<int>(i);
      if (max_hops != kNoHopLimit && root_hops >= max_hops) break;
      Residual res = base;
      for (const auto& a : accepted) {
        const auto& n = a.path.nodes;
        if (n.size() > i + 1 && std::equal(prev.begin(), prev.begin() + i + 1, n.begin()))
          res.block_edge(*topo.edge_between(n[i], n[i + 1]));
      }
      for (std::size_t r = 0; r < i; ++r) res.block_node(prev[r]);
      const int budget = max_hops == kNoHopLimit ? kNoHopLimit : max_hops - root_hops;
      auto spur = eda(topo, res, prev[i], dst, eval, budget);
      if (!spur) continue;
      std::vector<NodeId> total(prev.begin(), prev.begin() + i);
      total.insert(total.end(), spur->path.nodes.begin(), spur->path.nodes.end());
      if (!seen.insert(total).second) continue;
      candidates.push_back(finalize(std::move(total)));
    }
    if (candidates.empty()) break;
    auto best = std::min_element(candidates.begin(), candidates.end(), better_found);
    accepted.push_back(std::move(*best));
    candidates.erase(best);
  }
  std::stable_sort(accepted.begin(), accepted.end(), better_found);
  return accepted;
}

std::vector<SelectedPath> greedy_eda(const Topology& topo, Residual& residual,
                                     std::span<const SdPair> pairs, const MetricEvaluator& eval,
                                     int max_hops, int max_paths, std::span<const double> boost) {
  std::vector<SelectedPath> selected;
  std::vector<std::optional<FoundPath>> cache(pairs.size());
  std::vector<char> fresh(pairs.size(), 0);
  auto factor = [&](std::size_t i) { return i < boost.size() ? boost[i] : 1.0; };

  while (static_cast<int>(selected.size()) < max_paths) {
    int best = -1;
    PathScore best_score;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (pairs[i].source == pairs[i].destination) continue;
      // A cached optimum stays optimal while it keeps its width: the residual
      // only shrinks and scores never grow when resources shrink.
      if (fresh[i] && cache[i] &&
          path_width(topo, residual, cache[i]->path.nodes) != cache[i]->path.width)
        fresh[i] = 0;
      if (!fresh[i]) {
        cache[i] = eda(topo, residual, pairs[i].source, pairs[i].destination, eval, max_hops);
        fresh[i] = 1;
      }
      if (!cache[i]) continue;
      PathScore s = boost_score(cache[i]->score, eval.kind, factor(i));
      if (best < 0 || s > best_score) {
        best = static_cast<int>(i);
        best_score = s;
      }
    }
    if (best < 0) break;
    FoundPath chosen = *cache[best];
    fresh[best] = 0;
    SelectedPath sp{chosen.path, best, chosen.score, {}};
    sp.channels = residual.reserve(topo, chosen.path.nodes, chosen.path.width);
    selected.push_back(std::move(sp));
  }
  return selected;
}

int calibrate_h_m(const Topology& topo, double swap_rate, std::uint64_t seed, int sample_pairs) {
  const int n = topo.node_count();
  if (n < 2) return kMinHopBound;
  Rng rng(seed, {static_cast<std::uint64_t>(Stream::HopCalibration)});
  const MetricEvaluator eval{MetricKind::Ext, swap_rate};
  int h_m = 0;
  for (int t = 0; t < sample_pairs; ++t) {
    NodeId s = static_cast<NodeId>(rng.uniform_int(0, n - 1));
    NodeId d = static_cast<NodeId>(rng.uniform_int(0, n - 2));
    if (d >= s) ++d;
    Residual res(topo);
    const SdPair pair{s, d};
    for (const auto& sp : greedy_eda(topo, res, std::span(&pair, 1), eval, n - 1))
      if (sp.score.primary > 1.0) h_m = std::max(h_m, sp.path.hops());
  }
  return std::max(h_m, kMinHopBound);
}

int max_flow_width(const Topology& topo, const Residual& residual, NodeId src, NodeId dst) {
  if (src == dst) throw std::invalid_argument("max flow requires src != dst");
  using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
  using Graph = boost::adjacency_list<
      boost::vecS, boost::vecS, boost::directedS, boost::no_property,
      boost::property<boost::edge_capacity_t, long,
                      boost::property<boost::edge_residual_capacity_t, long,
                                      boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;
  const int n = topo.node_count();
  Graph g(2 * n);
  auto cap = boost::get(boost::edge_capacity, g);
  auto rev = boost::get(boost::edge_reverse, g);
  auto arc = [&](int a, int b, long c) {
    auto e1 = boost::add_edge(a, b, g).first;
    auto e2 = boost::add_edge(b, a, g).first;
    cap[e1] = c;
    cap[e2] = 0;
    rev[e1] = e2;
    rev[e2] = e1;
  };
  // node u splits into in = 2u and out = 2u + 1
  for (NodeId u = 0; u < n; ++u) {
    long c = (u == src || u == dst) ? residual.free_qubits(u) : residual.free_qubits(u) / 2;
    arc(2 * u, 2 * u + 1, std::max(0L, c));
  }
  for (const auto& e : topo.edges()) {
    long c = residual.free_channels(e.id);
    if (c <= 0) continue;
    arc(2 * e.u + 1, 2 * e.v, c);
    arc(2 * e.v + 1, 2 * e.u, c);
  }
  return static_cast<int>(boost::push_relabel_max_flow(g, 2 * src, 2 * dst + 1));
}

}  // namespace qnet
