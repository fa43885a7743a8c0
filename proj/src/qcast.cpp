#include "qnet/qcast.hpp"

#include <algorithm>
#include <tuple>

#include "p4_common.hpp"

namespace qnet {

std::vector<ReservedPath> qcast_p2_select(const Topology& topo, Residual& residual,
                                          std::span<const SdPair> pairs, double swap_rate,
                                          const QCastConfig& config, std::span<const double> boost) {
  const MetricEvaluator eval{MetricKind::Ext, swap_rate};
  std::vector<ReservedPath> majors;
  for (auto& sp : greedy_eda(topo, residual, pairs, eval, config.h_m, config.max_paths, boost)) {
    ReservedPath rp;
    rp.path = std::move(sp.path);
    rp.role = PathRole::Major;
    rp.pair_index = sp.pair;
    rp.span_end = rp.path.hops();
    rp.hop_channels = std::move(sp.channels);
    majors.push_back(std::move(rp));
  }
  return majors;
}

std::vector<ReservedPath> qcast_build_recovery(const Topology& topo, Residual& residual,
                                               std::span<const ReservedPath> majors,
                                               double swap_rate, const QCastConfig& config) {
  std::vector<ReservedPath> out;
  if (config.k == 0 || majors.empty()) return out;
  const MetricEvaluator eval{MetricKind::Ext, swap_rate};
  int longest = 0;
  for (const auto& m : majors) longest = std::max(longest, m.path.hops());
  const int max_span = config.k == kInfiniteRange ? longest : std::min(config.k, longest);
  int budget = config.max_paths - static_cast<int>(majors.size());

  for (int l = 1; l <= max_span; ++l) {
    for (int mi = 0; mi < static_cast<int>(majors.size()); ++mi) {
      const auto& nodes = majors[mi].path.nodes;
      const int h = majors[mi].path.hops();
      for (int i = 0; i + l <= h; ++i) {
        for (int r = 0; r < config.recovery_per_span; ++r) {
          if (budget <= 0) return out;
          // The loop may touch its major only at the two switch nodes.
          Residual search = residual;
          for (int v = 0; v <= h; ++v)
            if (v != i && v != i + l) search.block_node(nodes[v]);
          auto found = eda(topo, search, nodes[i], nodes[i + l], eval, config.h_m);
          if (!found || found->path.width < 1) break;
          ReservedPath rp;
          rp.hop_channels = residual.reserve(topo, found->path.nodes, found->path.width);
          rp.path = std::move(found->path);
          rp.role = PathRole::Recovery;
          rp.pair_index = majors[mi].pair_index;
          rp.host_major = mi;
          rp.span_begin = i;
          rp.span_end = i + l;
          out.push_back(std::move(rp));
          --budget;
        }
      }
    }
  }
  return out;
}

RoutingPlan qcast_plan(const Topology& topo, std::span<const SdPair> pairs, double swap_rate,
                       const QCastConfig& config, bool with_recovery, std::span<const double> boost) {
  Residual residual(topo);
  RoutingPlan plan;
  auto majors = qcast_p2_select(topo, residual, pairs, swap_rate, config, boost);
  std::vector<ReservedPath> recoveries;
  if (with_recovery) recoveries = qcast_build_recovery(topo, residual, majors, swap_rate, config);
  for (auto& m : majors) plan.add(std::move(m));
  for (auto& r : recoveries) plan.add(std::move(r));
  return plan;
}

namespace {

// A width-W_r recovery offers W_r unit detours ("slots"), slot c riding on the
// c-th established link of every recovery hop.
struct Slot {
  int recovery;
  int c;
  int begin;
  int end;
};

struct MajorSlots {
  std::vector<Slot> slots;
  std::vector<std::vector<int>> covering;  // per major hop, slots in preference order
  std::vector<std::vector<int>> rank;      // rank[s][f - begin] within covering[f]
};

std::vector<MajorSlots> build_slots(const RoutingPlan& plan) {
  std::vector<MajorSlots> out(plan.majors.size());
  for (int r = 0; r < static_cast<int>(plan.recoveries.size()); ++r) {
    const auto& rec = plan.recoveries[r];
    for (int c = 1; c <= rec.path.width; ++c)
      out[rec.host_major].slots.push_back({r, c, rec.span_begin, rec.span_end});
  }
  for (int mi = 0; mi < static_cast<int>(plan.majors.size()); ++mi) {
    auto& ms = out[mi];
    std::stable_sort(ms.slots.begin(), ms.slots.end(), [](const Slot& a, const Slot& b) {
      return std::tuple(a.end - a.begin, a.recovery, a.c) < std::tuple(b.end - b.begin, b.recovery, b.c);
    });
    ms.covering.assign(plan.majors[mi].path.hops(), {});
    ms.rank.assign(ms.slots.size(), {});
    for (int s = 0; s < static_cast<int>(ms.slots.size()); ++s)
      for (int f = ms.slots[s].begin; f < ms.slots[s].end; ++f) {
        ms.rank[s].push_back(static_cast<int>(ms.covering[f].size()));
        ms.covering[f].push_back(s);
      }
  }
  return out;
}

class QcastDecider {
 public:
  QcastDecider(const Topology& topo, const RoutingPlan& plan, const LinkStateView& view)
      : plan_(plan),
        index_(topo, plan),
        slots_(build_slots(plan)),
        major_links_(view, plan.majors),
        recovery_links_(view, plan.recoveries),
        owner_(plan.majors.size()) {
    for (std::size_t m = 0; m < plan.majors.size(); ++m) owner_[m].assign(slots_[m].slots.size(), -1);
  }

  void decide_at(NodeId u, std::vector<SwapDecision>& out) {
    for (const auto& occ : index_.majors[u]) on_major(u, occ.path, occ.position, out);
    for (const auto& occ : index_.recoveries[u]) {
      const auto& rec = plan_.recoveries[occ.path];
      if (occ.position > 0 && occ.position < rec.path.hops())
        detail::swap_through(out, u, recovery_links_, occ.path, occ.position, rec.path.width);
    }
  }

 private:
  // The 1-path that claims slot s, or 0. A failed hop f of 1-path j is the
  // (j - s_f)-th failure on f and takes the (j - s_f)-th slot covering f; a
  // slot claimed from several hops goes to the smallest j.
  int owner(int mi, int s) {
    int& o = owner_[mi][s];
    if (o >= 0) return o;
    const Slot& slot = slots_[mi].slots[s];
    const int width = plan_.majors[mi].path.width;
    o = 0;
    for (int f = slot.begin; f < slot.end; ++f) {
      int j = major_links_.count(mi, f) + 1 + slots_[mi].rank[s][f - slot.begin];
      if (j <= width && (o == 0 || j < o)) o = j;
    }
    return o;
  }

  // Slot s is used by 1-path j if j owns it and owns no lower slot of the
  // same recovery (one recovery forms at most one loop per 1-path).
  bool used_by(int mi, int s, int j) {
    if (owner(mi, s) != j) return false;
    const Slot& slot = slots_[mi].slots[s];
    for (int t = 0; t < static_cast<int>(slots_[mi].slots.size()); ++t) {
      const Slot& other = slots_[mi].slots[t];
      if (other.recovery == slot.recovery && other.c < slot.c && owner(mi, t) == j) return false;
    }
    return true;
  }

  void on_major(NodeId u, int mi, int i, std::vector<SwapDecision>& out) {
    const auto& major = plan_.majors[mi];
    const int h = major.path.hops();
    if (i == 0 || i == h) return;
    std::vector<int> near;
    for (int s = 0; s < static_cast<int>(slots_[mi].slots.size()); ++s) {
      const Slot& slot = slots_[mi].slots[s];
      if (slot.begin <= i && i <= slot.end) near.push_back(s);
    }
    for (int j = 1; j <= major.path.width; ++j) {
      int cover_left = 0, cover_right = 0;
      std::vector<std::optional<ChannelId>> ends;
      for (int s : near) {
        if (!used_by(mi, s, j)) continue;
        const Slot& slot = slots_[mi].slots[s];
        const auto& rec = plan_.recoveries[slot.recovery];
        if (slot.begin <= i - 1 && i - 1 < slot.end) ++cover_left;
        if (slot.begin <= i && i < slot.end) ++cover_right;
        if (slot.begin == i) ends.push_back(recovery_links_.nth(slot.recovery, 0, slot.c));
        if (slot.end == i) ends.push_back(recovery_links_.nth(slot.recovery, rec.path.hops() - 1, slot.c));
      }
      if (cover_left % 2 == 0) ends.push_back(major_links_.nth(mi, i - 1, j));
      if (cover_right % 2 == 0) ends.push_back(major_links_.nth(mi, i, j));
      if (ends.size() == 2 && ends[0] && ends[1]) out.push_back(SwapDecision::make(u, *ends[0], *ends[1]));
    }
  }

  const RoutingPlan& plan_;
  detail::PlanIndex index_;
  std::vector<MajorSlots> slots_;
  detail::UpLinkCache major_links_;
  detail::UpLinkCache recovery_links_;
  std::vector<std::vector<int>> owner_;
};

}  // namespace

std::vector<SwapDecision> qcast_p4(const Topology& topo, const RoutingPlan& plan,
                                   const LinkOutcomes& outcomes) {
  const auto view = LinkStateView::global(0, topo, outcomes);
  QcastDecider decider(topo, plan, view);
  std::vector<SwapDecision> out;
  for (NodeId u = 0; u < topo.node_count(); ++u) decider.decide_at(u, out);
  detail::finalize(out);
  return out;
}

std::vector<SwapDecision> qcast_p4_node(const Topology& topo, const RoutingPlan& plan,
                                        const LinkStateView& view) {
  QcastDecider decider(topo, plan, view);
  std::vector<SwapDecision> out;
  decider.decide_at(view.owner(), out);
  detail::finalize(out);
  return out;
}

}  // namespace qnet
