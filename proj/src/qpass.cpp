#include "qnet/qpass.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <tuple>

#include "p4_common.hpp"

namespace qnet {

const OfflinePathTable::Entry& OfflinePathTable::entry(const Topology& topo, NodeId a, NodeId b) {
  auto k = key(a, b);
  auto it = entries_.find(k);
  if (it == entries_.end()) it = entries_.emplace(k, Entry{initial_count_, false, {}}).first;
  Entry& e = it->second;
  if (!e.ready) {
    e.paths.clear();
    for (auto& fp : yen_k_shortest(topo, k.first, k.second, e.yen_count, metric_))
      e.paths.push_back(std::move(fp.path));
    e.ready = true;
  }
  return e;
}

std::vector<Path> OfflinePathTable::candidates(const Topology& topo, NodeId source, NodeId destination) {
  std::vector<Path> out = entry(topo, source, destination).paths;
  if (source > destination)
    for (auto& p : out) std::reverse(p.nodes.begin(), p.nodes.end());
  return out;
}

int OfflinePathTable::yen_count(NodeId a, NodeId b) const {
  auto it = entries_.find(key(a, b));
  return it == entries_.end() ? initial_count_ : it->second.yen_count;
}

void OfflinePathTable::grow(NodeId a, NodeId b) {
  auto k = key(a, b);
  auto it = entries_.find(k);
  if (it == entries_.end()) it = entries_.emplace(k, Entry{initial_count_, false, {}}).first;
  it->second.yen_count += (it->second.yen_count + 1) / 2;
  it->second.ready = false;
}

void OfflinePathTable::precompute(const Topology& topo) {
  for (NodeId a = 0; a < topo.node_count(); ++a)
    for (NodeId b = a + 1; b < topo.node_count(); ++b) entry(topo, a, b);
}

void OfflinePathTable::set_entry(NodeId a, NodeId b, Entry e) { entries_[key(a, b)] = std::move(e); }

OfflinePathTable qpass_offline(const Topology& topo, const MetricEvaluator& metric, int initial_count) {
  OfflinePathTable table(metric, initial_count);
  table.precompute(topo);
  return table;
}

namespace {

struct Queued {
  int pair;
  int candidate;
  int width;
  PathScore score;
};

// Boosted score, then input order.
struct QueueOrder {
  bool operator()(const Queued& a, const Queued& b) const {
    auto ka = std::tuple(a.score, -a.pair, -a.candidate);
    auto kb = std::tuple(b.score, -b.pair, -b.candidate);
    return ka < kb;
  }
};

ReservedPath reserve_as(const Topology& topo, Residual& residual, std::vector<NodeId> nodes, int width,
                        PathRole role, int pair) {
  ReservedPath rp;
  rp.hop_channels = residual.reserve(topo, nodes, width);
  rp.path = Path{std::move(nodes), width};
  rp.role = role;
  rp.pair_index = pair;
  rp.span_end = rp.path.hops();
  return rp;
}

}  // namespace

RoutingPlan qpass_p2(const Topology& topo, std::span<const SdPair> pairs, OfflinePathTable& table,
                     bool with_partials, std::span<const double> boost) {
  const MetricEvaluator& eval = table.metric();
  Residual residual(topo);
  RoutingPlan plan;

  std::vector<std::vector<Path>> cands(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p)
    if (pairs[p].source != pairs[p].destination)
      cands[p] = table.candidates(topo, pairs[p].source, pairs[p].destination);

  auto scored = [&](int p, int c, int width) {
    const double factor = static_cast<std::size_t>(p) < boost.size() ? boost[p] : 1.0;
    return Queued{p, c, width, boost_score(score_path(eval, topo, {cands[p][c].nodes, width}), eval.kind, factor)};
  };

  std::priority_queue<Queued, std::vector<Queued>, QueueOrder> queue;
  for (int p = 0; p < static_cast<int>(pairs.size()); ++p)
    for (int c = 0; c < static_cast<int>(cands[p].size()); ++c)
      queue.push(scored(p, c, path_width(topo, residual, cands[p][c].nodes)));

  std::vector<int> reserved(pairs.size(), 0);
  while (!queue.empty()) {
    const Queued top = queue.top();
    const auto& nodes = cands[top.pair][top.candidate].nodes;
    const int now = path_width(topo, residual, nodes);
    if (now < top.width) {
      queue.pop();
      queue.push(scored(top.pair, top.candidate, now));
      continue;
    }
    if (now == 0) break;
    queue.pop();
    plan.add(reserve_as(topo, residual, nodes, now, PathRole::Major, top.pair));
    ++reserved[top.pair];
  }

  if (with_partials) {
    while (!queue.empty()) {
      Queued e = queue.top();
      queue.pop();
      const auto& nodes = cands[e.pair][e.candidate].nodes;
      const int h = static_cast<int>(nodes.size()) - 1;
      int t = 0;
      while (t + 1 < h && path_width(topo, residual, std::span(nodes.data(), t + 2)) >= 1) ++t;
      if (t >= 1)
        plan.add(reserve_as(topo, residual, {nodes.begin(), nodes.begin() + t + 1}, 1, PathRole::Partial,
                            e.pair));
      int u = h;
      while (u - 1 > 0 && path_width(topo, residual, std::span(nodes.data() + u - 1, h - u + 2)) >= 1) --u;
      if (u <= h - 1)
        plan.add(reserve_as(topo, residual, {nodes.begin() + u, nodes.end()}, 1, PathRole::Partial, e.pair));
    }
  }

  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& s = pairs[p];
    if (s.source == s.destination || cands[p].empty()) continue;
    if (reserved[p] == static_cast<int>(cands[p].size()) &&
        static_cast<int>(cands[p].size()) >= table.yen_count(s.source, s.destination))
      table.grow(s.source, s.destination);
  }
  return plan;
}

namespace {

// A partial whose two endpoints sit on a major inside one segment.
struct Applicable {
  int partial;
  int major;
  int segment;
  int a, b;       // major positions, a < b
  bool reversed;  // partial runs from position b to a
};

class QpassDecider {
 public:
  QpassDecider(const Topology& topo, const RoutingPlan& plan, const LinkStateView& view, int k)
      : plan_(plan),
        index_(topo, plan),
        major_links_(view, plan.majors),
        partial_links_(view, plan.partials),
        by_partial_(plan.partials.size()),
        by_segment_(plan.majors.size()),
        claims_(plan.majors.size()) {
    for (int mi = 0; mi < static_cast<int>(plan.majors.size()); ++mi) {
      const int h = plan.majors[mi].path.hops();
      seg_len_.push_back(k == kInfiniteRange ? h : std::min(k + 1, h));
      const int segments = (h + seg_len_[mi] - 1) / seg_len_[mi];
      by_segment_[mi].resize(segments);
      claims_[mi].resize(segments);
    }
    for (int pi = 0; pi < static_cast<int>(plan.partials.size()); ++pi) {
      const auto& pn = plan.partials[pi].path.nodes;
      for (int mi = 0; mi < static_cast<int>(plan.majors.size()); ++mi) {
        const auto& mn = plan.majors[mi].path.nodes;
        auto pa = std::find(mn.begin(), mn.end(), pn.front());
        auto pb = std::find(mn.begin(), mn.end(), pn.back());
        if (pa == mn.end() || pb == mn.end()) continue;
        int a = static_cast<int>(pa - mn.begin()), b = static_cast<int>(pb - mn.begin());
        const bool reversed = a > b;
        if (reversed) std::swap(a, b);
        const int sigma = a / seg_len_[mi];
        const int seg_end = std::min((sigma + 1) * seg_len_[mi], plan.majors[mi].path.hops());
        if (b > seg_end) continue;
        Applicable app{pi, mi, sigma, a, b, reversed};
        by_partial_[pi].push_back(app);
        by_segment_[mi][sigma].push_back(app);
      }
    }
  }

  void decide_at(NodeId u, std::vector<SwapDecision>& out) {
    for (const auto& occ : index_.majors[u]) on_major(u, occ.path, occ.position, out);
    for (const auto& occ : index_.partials[u]) {
      const auto& part = plan_.partials[occ.path];
      if (occ.position > 0 && occ.position < part.path.hops())
        detail::swap_through(out, u, partial_links_, occ.path, occ.position, part.path.width);
    }
  }

 private:
  // For each failing 1-path j of the segment (ascending), the first
  // applicable partial covering all of j's failed hops that no smaller j
  // has picked. Result maps j -> partial.
  const std::map<int, int>& claims(int mi, int sigma) {
    auto& slot = claims_[mi][sigma];
    if (slot) return *slot;
    slot.emplace();
    const int lo = sigma * seg_len_[mi];
    const int hi = std::min(lo + seg_len_[mi], plan_.majors[mi].path.hops());
    std::vector<int> count;
    int least = std::numeric_limits<int>::max();
    for (int f = lo; f < hi; ++f) {
      count.push_back(major_links_.count(mi, f));
      least = std::min(least, count.back());
    }
    std::vector<char> taken(plan_.partials.size(), 0);
    for (int j = least + 1; j <= plan_.majors[mi].path.width; ++j) {
      for (const auto& app : by_segment_[mi][sigma]) {
        if (taken[app.partial]) continue;
        bool covers = true;
        for (int f = lo; f < hi && covers; ++f)
          if (count[f - lo] < j && (f < app.a || f >= app.b)) covers = false;
        if (!covers) continue;
        taken[app.partial] = 1;
        (*slot)[j] = app.partial;
        break;
      }
    }
    return *slot;
  }

  // Partial pi is adopted by 1-path j of major mi if that claim is the
  // smallest (major, j) among all claims on pi.
  bool adopted(int pi, int mi, int j) {
    std::pair<int, int> best{std::numeric_limits<int>::max(), 0};
    for (const auto& app : by_partial_[pi])
      for (const auto& [cj, cp] : claims(app.major, app.segment))
        if (cp == pi) best = std::min(best, std::pair{app.major, cj});
    return best == std::pair{mi, j};
  }

  std::optional<ChannelId> partial_end(const Applicable& app, bool at_a) {
    const int hops = plan_.partials[app.partial].path.hops();
    const bool first_hop = at_a != app.reversed;
    return partial_links_.nth(app.partial, first_hop ? 0 : hops - 1, 1);
  }

  void on_major(NodeId u, int mi, int i, std::vector<SwapDecision>& out) {
    const auto& major = plan_.majors[mi];
    if (i == 0 || i == major.path.hops()) return;
    std::vector<const Applicable*> ends_here;
    for (const auto& occ : index_.partials[u])
      for (const auto& app : by_partial_[occ.path])
        if (app.major == mi && (app.a == i || app.b == i)) ends_here.push_back(&app);
    for (int j = 1; j <= major.path.width; ++j) {
      auto left = major_links_.nth(mi, i - 1, j);
      auto right = major_links_.nth(mi, i, j);
      for (const Applicable* app : ends_here) {
        if (!adopted(app->partial, mi, j)) continue;
        if (app->b == i) left = partial_end(*app, false);
        if (app->a == i) right = partial_end(*app, true);
      }
      if (left && right) out.push_back(SwapDecision::make(u, *left, *right));
    }
  }

  const RoutingPlan& plan_;
  detail::PlanIndex index_;
  detail::UpLinkCache major_links_;
  detail::UpLinkCache partial_links_;
  std::vector<int> seg_len_;
  std::vector<std::vector<Applicable>> by_partial_;
  std::vector<std::vector<std::vector<Applicable>>> by_segment_;
  std::vector<std::vector<std::optional<std::map<int, int>>>> claims_;
};

}  // namespace

std::vector<SwapDecision> qpass_p4(const Topology& topo, const RoutingPlan& plan,
                                   const LinkOutcomes& outcomes, int k) {
  const auto view = LinkStateView::global(0, topo, outcomes);
  QpassDecider decider(topo, plan, view, k);
  std::vector<SwapDecision> out;
  for (NodeId u = 0; u < topo.node_count(); ++u) decider.decide_at(u, out);
  detail::finalize(out);
  return out;
}

std::vector<SwapDecision> qpass_p4_node(const Topology& topo, const RoutingPlan& plan,
                                        const LinkStateView& view, int k) {
  QpassDecider decider(topo, plan, view, k);
  std::vector<SwapDecision> out;
  decider.decide_at(view.owner(), out);
  detail::finalize(out);
  return out;
}

}  // namespace qnet
