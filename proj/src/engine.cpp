#include "qnet/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "qnet/baselines.hpp"
#include "qnet/qcast.hpp"
#include "qnet/rng.hpp"

namespace qnet {

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::QCast: return "qcast";
    case Algorithm::QPass: return "qpass";
    case Algorithm::Slmp: return "slmp";
    case Algorithm::Greedy: return "greedy";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "qcast") return Algorithm::QCast;
  if (name == "qpass") return Algorithm::QPass;
  if (name == "slmp") return Algorithm::Slmp;
  if (name == "greedy") return Algorithm::Greedy;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

namespace {

void validate_simulation(const SimConfig& c, int n) {
  if (!(c.swap_rate >= 0.0 && c.swap_rate <= 1.0)) throw ConfigError("q", "must lie in [0, 1]");
  if (c.k < 0 && c.k != kInfiniteRange) throw ConfigError("k", "must be >= 0 or infinite");
  if (c.slots < 0) throw ConfigError("slots", "must be >= 0");
  if (c.h_m < 0) throw ConfigError("h_m", "must be >= 0 (0 calibrates)");
  if (c.fixed_pairs.empty()) {
    if (c.pairs < 1) throw ConfigError("m", "must be >= 1");
    if (static_cast<long long>(c.pairs) > static_cast<long long>(n) * (n - 1) / 2)
      throw ConfigError("m", "exceeds the number of node pairs n(n-1)/2");
  }
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& p : c.fixed_pairs) {
    if (p.source < 0 || p.source >= n || p.destination < 0 || p.destination >= n)
      throw ConfigError("fixed_pairs", "node id out of range");
    if (p.source == p.destination) throw ConfigError("fixed_pairs", "source equals destination");
    if (!seen.insert({std::min(p.source, p.destination), std::max(p.source, p.destination)}).second)
      throw ConfigError("fixed_pairs", "duplicate pair");
  }
}

}  // namespace

void validate(const SimConfig& c) {
  if (c.n < 2) throw ConfigError("n", "must be >= 2");
  if (!(c.target_rate > 0.0 && c.target_rate < 1.0)) throw ConfigError("E_p", "must lie in (0, 1)");
  if (!(c.target_degree >= 1.0)) throw ConfigError("E_d", "must be >= 1");
  validate_simulation(c, c.n);
}

WaxmanParams waxman_params(const SimConfig& c) {
  WaxmanParams w;
  w.n = c.n;
  w.target_degree = c.target_degree;
  w.target_rate = c.target_rate;
  w.seed = c.topology_seed;
  return w;
}

int SlotOutcome::total_ebits() const {
  int t = 0;
  for (int e : ebits) t += e;
  return t;
}

int SlotOutcome::epairs() const {
  return static_cast<int>(std::count_if(ebits.begin(), ebits.end(), [](int e) { return e > 0; }));
}

std::vector<SdPair> draw_sd_pairs(int n, int m, std::uint64_t seed, int slot) {
  if (n < 2 || m < 0 || static_cast<long long>(m) > static_cast<long long>(n) * (n - 1) / 2)
    throw std::invalid_argument("cannot draw that many distinct pairs");
  Rng rng(seed, {static_cast<std::uint64_t>(Stream::Pairs), static_cast<std::uint64_t>(slot)});
  std::set<std::pair<NodeId, NodeId>> seen;
  std::vector<SdPair> out;
  while (static_cast<int>(out.size()) < m) {
    NodeId a = static_cast<NodeId>(rng.uniform_int(0, n - 1));
    NodeId b = static_cast<NodeId>(rng.uniform_int(0, n - 2));
    if (b >= a) ++b;
    if (seen.insert({std::min(a, b), std::max(a, b)}).second) out.push_back({a, b});
  }
  return out;
}

LinkOutcomes realize_links(const Topology& topo, const RoutingPlan& plan, std::uint64_t seed, int slot) {
  LinkOutcomes out{std::vector<char>(topo.channel_count(), 0)};
  for (ChannelId c : plan.bound_channels) {
    const double u = keyed_uniform(seed, {static_cast<std::uint64_t>(Stream::LinkDraw),
                                          static_cast<std::uint64_t>(slot), static_cast<std::uint64_t>(c)});
    out.up[c] = u < topo.channel(c).success_rate;
  }
  return out;
}

ChannelUse channel_use(const Topology& topo, const RoutingPlan& plan) {
  ChannelUse use{std::vector<int>(topo.channel_count(), -1), std::vector<char>(topo.channel_count(), 0)};
  auto mark = [&](const std::vector<ReservedPath>& paths, bool recovery) {
    for (const auto& p : paths)
      for (const auto& hop : p.hop_channels)
        for (ChannelId c : hop) {
          use.pair[c] = p.pair_index;
          use.recovery[c] = recovery;
        }
  };
  mark(plan.majors, false);
  mark(plan.recoveries, true);
  mark(plan.partials, true);
  return use;
}

SwapResult execute_swaps(const Topology& topo, std::span<const SwapDecision> swaps,
                         const LinkOutcomes& outcomes, std::span<const SdPair> pairs,
                         const ChannelUse& use, double swap_rate, std::uint64_t seed, int slot) {
  const int channels = topo.channel_count();
  // partner[2c + side]: channel joined to c at its u (side 0) or v (side 1) end
  std::vector<int> partner(2 * static_cast<std::size_t>(channels), -1);
  std::vector<int> swap_of(2 * static_cast<std::size_t>(channels), -1);
  auto side = [&](ChannelId c, NodeId x) {
    const Channel& ch = topo.channel(c);
    if (ch.u == x) return 0;
    if (ch.v == x) return 1;
    throw std::logic_error("swap at a node the channel does not touch");
  };
  for (int i = 0; i < static_cast<int>(swaps.size()); ++i) {
    const auto& s = swaps[i];
    if (!outcomes[s.first] || !outcomes[s.second]) throw std::logic_error("swap uses a missing link");
    for (auto [a, b] : {std::pair{s.first, s.second}, std::pair{s.second, s.first}}) {
      const int key = 2 * a + side(a, s.node);
      if (partner[key] >= 0) throw std::logic_error("link used in more than one swap");
      partner[key] = b;
      swap_of[key] = i;
    }
  }
  auto swap_ok = [&](int i) {
    const auto& s = swaps[i];
    return keyed_uniform(seed, {static_cast<std::uint64_t>(Stream::SwapDraw), static_cast<std::uint64_t>(slot),
                                static_cast<std::uint64_t>(s.node), static_cast<std::uint64_t>(s.first),
                                static_cast<std::uint64_t>(s.second)}) < swap_rate;
  };

  SwapResult result{std::vector<int>(pairs.size(), 0), std::vector<char>(pairs.size(), 0)};
  for (int p = 0; p < static_cast<int>(pairs.size()); ++p) {
    const NodeId s = pairs[p].source, d = pairs[p].destination;
    for (const auto& adj : topo.neighbors(s))
      for (ChannelId start : topo.edge(adj.edge).channels) {
        if (use.pair[start] != p || !outcomes[start] || partner[2 * start + side(start, s)] >= 0) continue;
        bool ok = true, recovery = use.recovery[start] != 0;
        ChannelId c = start;
        NodeId at = s;
        for (int steps = 0; steps <= channels; ++steps) {
          at = topo.channel(c).u == at ? topo.channel(c).v : topo.channel(c).u;
          const int key = 2 * c + side(c, at);
          if (partner[key] < 0) {
            if (at == d && ok) {
              ++result.ebits[p];
              result.recovery_used[p] |= recovery;
            }
            break;
          }
          ok = ok && swap_ok(swap_of[key]);
          c = partner[key];
          recovery = recovery || use.recovery[c];
        }
      }
  }
  return result;
}

double fairness_factor(int streak) { return std::pow(1.1, streak); }

double fairness_adjust(double value, MetricKind kind, int streak) {
  const double f = fairness_factor(streak);
  return kind == MetricKind::SumDist || kind == MetricKind::CreationRate ? value / f : value * f;
}

int FairnessState::streak(SdPair p) const {
  auto it = streaks_.find({std::min(p.source, p.destination), std::max(p.source, p.destination)});
  return it == streaks_.end() ? 0 : it->second;
}

void FairnessState::record(SdPair p, bool success) {
  int& s = streaks_[{std::min(p.source, p.destination), std::max(p.source, p.destination)}];
  s = success ? 0 : s + 1;
}

Simulator::Simulator(Topology topo, SimConfig config)
    : topo_(std::move(topo)), config_(std::move(config)) {
  validate_simulation(config_, topo_.node_count());
  if (config_.algorithm == Algorithm::QCast)
    h_m_ = config_.h_m > 0 ? config_.h_m : calibrate_h_m(topo_, config_.swap_rate, config_.seed);
  table_ = OfflinePathTable({config_.metric, config_.swap_rate});
}

SlotTrace Simulator::trace_slot(int slot) {
  const auto pairs = config_.fixed_pairs.empty()
                         ? draw_sd_pairs(topo_.node_count(), config_.pairs, config_.seed, slot)
                         : config_.fixed_pairs;
  std::vector<double> boost;
  if (config_.fairness)
    for (const auto& p : pairs) boost.push_back(fairness_.factor(p));

  SlotTrace t;
  switch (config_.algorithm) {
    case Algorithm::QCast: {
      QCastConfig qc;
      qc.k = config_.k;
      qc.h_m = h_m_;
      t.plan = qcast_plan(topo_, pairs, config_.swap_rate, qc, config_.recovery, boost);
      break;
    }
    case Algorithm::QPass: t.plan = qpass_p2(topo_, pairs, table_, config_.recovery, boost); break;
    case Algorithm::Slmp: t.plan = slmp_p2(topo_); break;
    case Algorithm::Greedy: t.plan = greedy_route(topo_, pairs); break;
  }
  t.links = realize_links(topo_, t.plan, config_.seed, slot);

  ChannelUse use = channel_use(topo_, t.plan);
  std::vector<int> slmp_routes(pairs.size(), 0);
  if (config_.algorithm == Algorithm::Slmp) {
    auto r = slmp_p4(topo_, t.plan, t.links, pairs);
    t.swaps = std::move(r.swaps);
    for (std::size_t i = 0; i < r.routes.size(); ++i) {
      for (ChannelId c : r.routes[i]) use.pair[c] = r.route_pair[i];
      ++slmp_routes[r.route_pair[i]];
    }
  } else if (!config_.distributed) {
    t.swaps = config_.algorithm == Algorithm::QPass ? qpass_p4(topo_, t.plan, t.links, config_.k)
                                                    : qcast_p4(topo_, t.plan, t.links);
  } else {
    for (NodeId u = 0; u < topo_.node_count(); ++u) {
      const auto view = view_of(topo_, t.links, u, config_.k);
      auto local = config_.algorithm == Algorithm::QPass ? qpass_p4_node(topo_, t.plan, view, config_.k)
                                                          : qcast_p4_node(topo_, t.plan, view);
      t.swaps.insert(t.swaps.end(), local.begin(), local.end());
    }
    std::sort(t.swaps.begin(), t.swaps.end());
  }

  auto result = execute_swaps(topo_, t.swaps, t.links, pairs, use, config_.swap_rate, config_.seed, slot);

  SlotOutcome& o = t.outcome;
  o.slot = slot;
  o.pairs = pairs;
  o.ebits = std::move(result.ebits);
  o.recovery_used = std::move(result.recovery_used);
  o.paths = config_.algorithm == Algorithm::Slmp ? slmp_routes : std::vector<int>(pairs.size(), 0);
  for (const auto& m : t.plan.majors) o.paths[m.pair_index] += m.path.width;
  for (const auto* list : {&t.plan.recoveries, &t.plan.partials})
    for (const auto& r : *list) o.recovery_widths.push_back(r.path.width);
  o.channels_bound = static_cast<int>(t.plan.bound_channels.size());
  o.feasible = t.plan.feasible(topo_);

  if (config_.fairness)
    for (std::size_t i = 0; i < pairs.size(); ++i) fairness_.record(pairs[i], o.ebits[i] > 0);
  return t;
}

std::vector<SlotOutcome> Simulator::run() {
  std::vector<SlotOutcome> out;
  out.reserve(config_.slots);
  for (int s = 0; s < config_.slots; ++s) out.push_back(run_slot(s));
  return out;
}

void write_outcome_csv_header(std::ostream& out) {
  out << "slot,pair,ebits,epair,paths,recovery_used,channels_bound\n";
}

void write_outcome_csv(std::ostream& out, const SlotOutcome& o) {
  for (std::size_t i = 0; i < o.pairs.size(); ++i)
    out << o.slot << ',' << i << ',' << o.ebits[i] << ',' << (o.ebits[i] > 0 ? 1 : 0) << ',' << o.paths[i]
        << ',' << static_cast<int>(o.recovery_used[i]) << ',' << o.channels_bound << '\n';
}

}  // namespace qnet
