#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qnet/engine.hpp"
#include "qnet/pathfind.hpp"
#include "qnet/qcast.hpp"
#include "qnet/qpass.hpp"
#include "qnet/rng.hpp"
#include "qnet/stats.hpp"
#include "support.hpp"

using namespace qnet;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!v.pass) ++failures;
  std::printf("%s %2d %s (%.2fs) %s\n", v.pass ? "PASS" : "FAIL", id, name, secs, v.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

SimConfig scaled_reference(Algorithm a) {
  SimConfig c;
  c.n = 50;
  c.pairs = 10;
  c.target_rate = 0.6;
  c.swap_rate = 0.9;
  c.k = 3;
  c.target_degree = 6;
  c.algorithm = a;
  return c;
}

Verdict ext_enumeration() {
  double worst = 0.0;
  int cases = 0;
  for (int h = 1; h <= 6; ++h)
    for (int w = 1; w <= 4; ++w)
      for (int pi = 1; pi <= 9; ++pi)
        for (double q : {0.8, 0.9, 1.0}) {
          const std::vector<double> rates(h, pi / 10.0);
          worst = std::max(worst, std::abs(ext(rates, w, q) - oracle::expected_ebits(rates, w, q)));
          ++cases;
        }
  // Mixed per-hop rates on top of the uniform grid.
  Rng rng(11, {1});
  for (int i = 0; i < 300; ++i) {
    std::vector<double> rates(1 + rng.uniform_int(0, 5));
    for (double& r : rates) r = rng.uniform(0.05, 0.95);
    const int w = static_cast<int>(rng.uniform_int(1, 4));
    const double q = 0.8 + 0.1 * static_cast<double>(rng.uniform_int(0, 2));
    worst = std::max(worst, std::abs(ext(rates, w, q) - oracle::expected_ebits(rates, w, q)));
    ++cases;
  }
  return {worst < 1e-10, fmt("cases=%.0f max_err=%.2e", cases, worst)};
}

Verdict wide_path_claim() {
  const std::vector<double> hops(4, 0.5);
  const double wide = 1.0 - ext_distribution(hops, 2)[0];
  const double single = ext_distribution(hops, 1)[1];
  const double two_singles = 1.0 - (1.0 - single) * (1.0 - single);
  const bool exact = std::abs(wide - 0.31640625) < 1e-15 && std::abs(two_singles - 0.12109375) < 1e-15;

  // S=0, D=5: wide path 0-1-2-3-5 and a second disjoint 1-path 0-4-6-7-5.
  const Topology t = support::make_graph({4, 4, 4, 4, 4, 4, 4, 4},
                                         {{0, 1, 2, 0.5}, {1, 2, 2, 0.5}, {2, 3, 2, 0.5}, {3, 5, 2, 0.5},
                                          {0, 4, 1, 0.5}, {4, 6, 1, 0.5}, {6, 7, 1, 0.5}, {7, 5, 1, 0.5}});
  Residual r(t);
  RoutingPlan wide_plan, singles_plan;
  wide_plan.add(support::reserve(t, r, {0, 1, 2, 3, 5}, 2, PathRole::Major, 0));
  Residual r2(t);
  singles_plan.add(support::reserve(t, r2, {0, 1, 2, 3, 5}, 1, PathRole::Major, 0));
  singles_plan.add(support::reserve(t, r2, {0, 4, 6, 7, 5}, 1, PathRole::Major, 0));

  auto connected = [](const RoutingPlan& plan, const LinkOutcomes& links, std::size_t path) {
    for (const auto& hop : plan.majors[path].hop_channels) {
      bool any = false;
      for (ChannelId c : hop) any = any || links[c];
      if (!any) return false;
    }
    return true;
  };
  const int slots = 1000000;
  long hits_wide = 0, hits_singles = 0;
  for (int s = 0; s < slots; ++s) {
    hits_wide += connected(wide_plan, realize_links(t, wide_plan, 5, s), 0);
    const auto links = realize_links(t, singles_plan, 6, s);
    hits_singles += connected(singles_plan, links, 0) || connected(singles_plan, links, 1);
  }
  const double fw = static_cast<double>(hits_wide) / slots, fs = static_cast<double>(hits_singles) / slots;
  const double sw = std::sqrt(wide * (1 - wide) / slots), ss = std::sqrt(two_singles * (1 - two_singles) / slots);
  const bool mc = std::abs(fw - wide) <= 3 * sw && std::abs(fs - two_singles) <= 3 * ss;
  return {exact && mc, fmt("wide=%.8f mc=%.5f singles=%.8f mc=%.5f", wide, fw, two_singles, fs)};
}

Verdict wide_beats_singles() {
  bool ok = true;
  double tightest = INFINITY;
  for (double p : {0.9, 0.6})
    for (int h = 2; h <= 10; ++h) {
      const std::vector<double> rates(h, p);
      const double one = ext(rates, 1, 1.0);
      for (int w : {2, 3}) {
        const double ratio = ext(rates, w, 1.0) / (w * one);
        tightest = std::min(tightest, ratio);
        ok = ok && ratio > 1.0;
      }
    }
  return {ok, fmt("min EXT(W)/(W*EXT(1))=%.4f", tightest)};
}

Verdict example_one() {
  using namespace fixture_node;
  const Fixture f = fixture_appendix(1);
  Residual r(f.topology);
  const std::vector<SdPair> pairs{{f.source, f.destination}};
  const auto picked = greedy_eda(f.topology, r, pairs, {MetricKind::Ext, f.swap_rate}, kNoHopLimit);
  int total = 0;
  for (const auto& p : picked) total += p.path.width;
  const int flow = max_flow_width(f.topology, Residual(f.topology), S, T);
  const bool red = picked.size() == 1 && picked[0].path.nodes == std::vector<NodeId>{S, A, B, T};
  return {red && total == 3 && flow == 6 && oracle::max_flow(f.topology, S, T) == 6,
          fmt("paths=%.0f width=%.0f maxflow=%.0f", static_cast<double>(picked.size()), total, flow)};
}

Verdict example_two() {
  using namespace fixture_node;
  const Fixture f = fixture_appendix(2);
  Residual r(f.topology);
  const std::vector<SdPair> pairs{{f.source, f.destination}};
  const auto picked = greedy_eda(f.topology, r, pairs, {MetricKind::Ext, f.swap_rate}, kNoHopLimit);
  if (picked.empty()) return {false, "nothing selected"};
  const auto& first = picked[0].path;
  const double red = oracle::expected_ebits(oracle::rates_of(f.topology, first.nodes), first.width, 1.0);
  const double singles = oracle::expected_ebits(oracle::rates_of(f.topology, {S, A, B, T}), 1, 1.0) +
                         oracle::expected_ebits(oracle::rates_of(f.topology, {S, C, A, E, T}), 1, 1.0) +
                         oracle::expected_ebits(oracle::rates_of(f.topology, {S, D, B, F, T}), 1, 1.0);
  const bool ok = first.nodes == std::vector<NodeId>{S, A, B, T} && first.width == 2 &&
                  std::abs(picked[0].score.primary - 0.63936) < 1e-12 && std::abs(red - 0.63936) < 1e-12 &&
                  std::abs(singles - 0.4752) < 1e-12 && red > singles;
  return {ok, fmt("first EXT=%.5f singles=%.4f", picked[0].score.primary, singles)};
}

Verdict eda_optimality() {
  double worst = 0.0;
  int mismatched = 0;
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    Rng rng(seed, {2});
    const int n = static_cast<int>(rng.uniform_int(3, 10));
    const int hm = static_cast<int>(rng.uniform_int(1, 4));
    const double q = 0.8 + 0.1 * static_cast<double>(rng.uniform_int(0, 2));
    const Topology t = support::random_graph(seed * 7919, n, rng.uniform(0.1, 0.6));
    const auto want = oracle::best_ext(t, 0, n - 1, q, hm);
    const auto got = eda(t, Residual(t), 0, n - 1, {MetricKind::Ext, q}, hm);
    if (want.value <= 0.0) {
      mismatched += got.has_value();
      continue;
    }
    if (!got || got->path.hops() > hm) {
      ++mismatched;
      continue;
    }
    worst = std::max(worst, std::abs(got->score.primary - want.value));
  }
  return {mismatched == 0 && worst < 1e-9, fmt("graphs=500 mismatched=%.0f max_err=%.2e", mismatched, worst)};
}

// Runs criterion 7's experiment and returns the concatenated per-slot CSV.
std::string contention_run(long* violations, long* slots) {
  std::ostringstream csv;
  write_outcome_csv_header(csv);
  for (int t = 0; t < 10; ++t) {
    SimConfig c = scaled_reference(Algorithm::QCast);
    c.slots = 1000;
    c.topology_seed = 1 + t;
    c.seed = 100 + t;
    Simulator sim(generate_waxman(waxman_params(c)), c);
    for (int s = 0; s < c.slots; ++s) {
      const auto trace = sim.trace_slot(s);
      if (violations && !oracle::within_capacity(sim.topology(), trace.plan.bound_channels)) ++*violations;
      if (slots) ++*slots;
      write_outcome_csv(csv, trace.outcome);
    }
  }
  return csv.str();
}

std::string first_csv;

Verdict contention_free() {
  long violations = 0, slots = 0;
  first_csv = contention_run(&violations, &slots);
  return {violations == 0 && slots == 10000, fmt("slots=%.0f violations=%.0f", slots, violations)};
}

std::vector<SwapDecision> per_node(const Topology& g, const RoutingPlan& plan, const LinkOutcomes& links, int k,
                                   bool qpass) {
  std::vector<SwapDecision> all;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const auto view = view_of(g, links, u, k);
    auto local = qpass ? qpass_p4_node(g, plan, view, k) : qcast_p4_node(g, plan, view);
    all.insert(all.end(), local.begin(), local.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

Verdict distributed_consistency() {
  int differing = 0, injected = 0, recovering = 0;
  for (int t = 0; t < 2; ++t) {
    WaxmanParams w;
    w.n = 50;
    w.seed = 40 + t;
    const Topology g = generate_waxman(w);
    OfflinePathTable table({MetricKind::CreationRate, 1.0});
    QCastConfig cfg;
    cfg.h_m = calibrate_h_m(g, 0.9, 1);
    Rng inject(77 + t, {3});
    for (int s = 0; s < 50; ++s) {
      const auto pairs = draw_sd_pairs(g.node_count(), 10, 9 + t, s);
      const int k = std::vector<int>{1, 3, kInfiniteRange}[s % 3];
      cfg.k = k;
      for (bool qpass : {true, false}) {
        const RoutingPlan plan = qpass ? qpass_p2(g, pairs, table, true) : qcast_plan(g, pairs, 0.9, cfg, true);
        LinkOutcomes links = realize_links(g, plan, 3, s);
        for (ChannelId c : plan.bound_channels)
          if (links.up[c] && inject.bernoulli(0.15)) {
            links.up[c] = 0;
            ++injected;
          }
        const auto central = qpass ? qpass_p4(g, plan, links, k) : qcast_p4(g, plan, links);
        differing += central != per_node(g, plan, links, k, qpass);
        const ChannelUse use = channel_use(g, plan);
        for (const auto& d : central) {
          if (use.recovery[d.first] || use.recovery[d.second]) {
            ++recovering;
            break;
          }
        }
      }
    }
  }
  return {differing == 0 && injected > 0 && recovering > 0,
          fmt("slots=100 x2 algorithms differing=%.0f injected=%.0f plans_with_helper_swaps=%.0f", differing, injected,
              recovering)};
}

Verdict ordering() {
  auto mean_of = [](Algorithm a) {
    SimConfig c = scaled_reference(a);
    c.metric = MetricKind::CreationRate;
    c.slots = 500;
    c.seed = 7;
    c.topology_seed = 7;
    return run_experiment(c, 5);
  };
  const auto qcast = mean_of(Algorithm::QCast), qpass = mean_of(Algorithm::QPass);
  const auto slmp = mean_of(Algorithm::Slmp), greedy = mean_of(Algorithm::Greedy);
  auto gap = [](const ExperimentResult& hi, const ExperimentResult& lo) {
    const double se = std::sqrt(hi.stderr_eps * hi.stderr_eps + lo.stderr_eps * lo.stderr_eps);
    return hi.mean_eps - lo.mean_eps > 2 * se;
  };
  const bool ok = gap(qcast, qpass) && gap(qpass, slmp) && gap(qcast, greedy);
  char buf[256];
  std::snprintf(buf, sizeof buf, "qcast=%.3f(%.3f) qpass=%.3f(%.3f) slmp=%.3f(%.3f) greedy=%.3f(%.3f)", qcast.mean_eps,
                qcast.stderr_eps, qpass.mean_eps, qpass.stderr_eps, slmp.mean_eps, slmp.stderr_eps, greedy.mean_eps,
                greedy.stderr_eps);
  return {ok, buf};
}

Verdict recovery_contribution() {
  bool ok = true;
  std::string detail;
  for (Algorithm a : {Algorithm::QCast, Algorithm::QPass}) {
    long decreases = 0, with_total = 0, without_total = 0, slots = 0;
    for (int t = 0; t < 3; ++t) {
      SimConfig c = scaled_reference(a);
      c.slots = 400;
      c.topology_seed = 20 + t;
      c.seed = 30 + t;
      const Topology g = generate_waxman(waxman_params(c));
      c.recovery = false;
      Simulator off(g, c);
      c.recovery = true;
      Simulator on(g, c);
      for (int s = 0; s < c.slots; ++s) {
        const auto x = off.run_slot(s), y = on.run_slot(s);
        for (std::size_t p = 0; p < x.ebits.size(); ++p) decreases += y.ebits[p] < x.ebits[p];
        without_total += x.total_ebits();
        with_total += y.total_ebits();
        ++slots;
      }
    }
    ok = ok && decreases == 0 && with_total > without_total;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s%s off=%.3f on=%.3f decreases=%ld", detail.empty() ? "" : "; ", to_string(a),
                  static_cast<double>(without_total) / slots, static_cast<double>(with_total) / slots, decreases);
    detail += buf;
  }
  return {ok, detail};
}

Verdict fairness_fixture() {
  const Topology t = support::make_graph({2, 2, 2, 2, 2}, {{0, 4, 1, 1.0}, {4, 1, 1, 1.0}, {2, 4, 1, 1.0}, {4, 3, 1, 1.0}});
  SimConfig c;
  c.algorithm = Algorithm::QCast;
  c.fixed_pairs = {{0, 1}, {2, 3}};
  c.swap_rate = 1.0;
  c.h_m = 10;
  c.slots = 30;
  Simulator unfair(t, c);
  int unfair_wins = 0;
  for (int s = 0; s < 30; ++s) unfair_wins += unfair.run_slot(s).ebits[1] > 0;
  c.fairness = true;
  Simulator fair(t, c);
  int first = -1;
  for (int s = 0; s < 30 && first < 0; ++s)
    if (fair.run_slot(s).ebits[1] > 0) first = s;
  return {unfair_wins == 0 && first >= 0, fmt("losing pair wins without fairness=%.0f, first success with=%.0f",
                                              unfair_wins, first)};
}

Verdict determinism() {
  if (first_csv.empty()) first_csv = contention_run(nullptr, nullptr);
  const std::string second = contention_run(nullptr, nullptr);
  return {second == first_csv, fmt("bytes=%.0f", static_cast<double>(second.size()))};
}

}  // namespace

int main() {
  report(1, "ext matches per-hop enumeration", ext_enumeration);
  report(2, "wide path vs two single paths", wide_path_claim);
  report(3, "wide paths beat W single paths", wide_beats_singles);
  report(4, "example 1 red path and max flow", example_one);
  report(5, "example 2 red path first", example_two);
  report(6, "eda optimal vs brute force", eda_optimality);
  report(7, "q-cast reservations contention-free", contention_free);
  report(8, "per-node p4 equals centralized", distributed_consistency);
  report(9, "algorithm ordering", ordering);
  report(10, "recovery contribution", recovery_contribution);
  report(11, "fairness fixture", fairness_fixture);
  report(12, "byte-identical rerun", determinism);
  std::printf("%s: %d failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 3 : 0;
}
