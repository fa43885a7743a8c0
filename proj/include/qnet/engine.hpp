#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnet/pathfind.hpp"
#include "qnet/plan.hpp"
#include "qnet/qpass.hpp"

namespace qnet {

enum class Algorithm { QCast, QPass, Slmp, Greedy };

const char* to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

struct SimConfig {
  int n = 100;
  double target_rate = 0.6;    // E_p
  double swap_rate = 0.9;      // q
  int k = 3;                   // kInfiniteRange for unbounded
  double target_degree = 6.0;  // E_d
  int pairs = 10;              // m
  Algorithm algorithm = Algorithm::QCast;
  MetricKind metric = MetricKind::CreationRate;  // Q-PASS offline metric
  int slots = 1000;
  bool recovery = true;
  bool fairness = false;
  std::uint64_t seed = 1;           // simulation
  std::uint64_t topology_seed = 1;  // generator
  int h_m = 0;                      // 0: calibrate
  bool distributed = false;         // P4 per node from k-hop views
  std::vector<SdPair> fixed_pairs;  // overrides the per-slot draw when non-empty
};

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field(std::move(field)) {}
  std::string field;
};

/// Throws ConfigError naming the first offending field.
void validate(const SimConfig& config);

WaxmanParams waxman_params(const SimConfig& config);

struct SlotOutcome {
  int slot = 0;
  std::vector<SdPair> pairs;
  std::vector<int> ebits;            // per pair
  std::vector<int> paths;            // per pair, a W-path counts W times
  std::vector<char> recovery_used;   // per pair
  std::vector<int> recovery_widths;  // widths of recovery or partial paths
  int channels_bound = 0;
  bool feasible = true;

  int total_ebits() const;
  int epairs() const;
};

/// m distinct unordered pairs drawn uniformly without replacement.
std::vector<SdPair> draw_sd_pairs(int n, int m, std::uint64_t seed, int slot);

/// Independent Bernoulli(p_c) per bound channel, keyed by (seed, slot, channel).
LinkOutcomes realize_links(const Topology& topo, const RoutingPlan& plan, std::uint64_t seed, int slot);

/// Who owns a channel for ebit accounting.
struct ChannelUse {
  std::vector<int> pair;       // -1 if unowned
  std::vector<char> recovery;  // 1 for recovery or partial channels
};
ChannelUse channel_use(const Topology& topo, const RoutingPlan& plan);

struct SwapResult {
  std::vector<int> ebits;
  std::vector<char> recovery_used;
};

/// Follows every chain that starts at a pair's source on one of its own
/// established links and ends unswapped at its destination; each such chain
/// is an ebit if all of its swaps succeed (probability q each, keyed by
/// (seed, slot, node, channels)).
SwapResult execute_swaps(const Topology& topo, std::span<const SwapDecision> swaps,
                         const LinkOutcomes& outcomes, std::span<const SdPair> pairs,
                         const ChannelUse& use, double swap_rate, std::uint64_t seed, int slot);

/// Failing-streak multiplier 1.1^streak.
double fairness_factor(int streak);
double fairness_adjust(double value, MetricKind kind, int streak);

class FairnessState {
 public:
  int streak(SdPair p) const;
  double factor(SdPair p) const { return fairness_factor(streak(p)); }
  void record(SdPair p, bool success);

 private:
  std::map<std::pair<NodeId, NodeId>, int> streaks_;
};

/// Everything one slot produced, for debugging and plan export.
struct SlotTrace {
  RoutingPlan plan;
  LinkOutcomes links;
  std::vector<SwapDecision> swaps;
  SlotOutcome outcome;
};

class Simulator {
 public:
  Simulator(Topology topo, SimConfig config);

  const Topology& topology() const { return topo_; }
  const SimConfig& config() const { return config_; }
  int h_m() const { return h_m_; }
  OfflinePathTable& offline_table() { return table_; }
  const FairnessState& fairness() const { return fairness_; }

  SlotOutcome run_slot(int slot) { return trace_slot(slot).outcome; }
  SlotTrace trace_slot(int slot);
  std::vector<SlotOutcome> run();

 private:
  Topology topo_;
  SimConfig config_;
  int h_m_ = kNoHopLimit;
  OfflinePathTable table_;
  FairnessState fairness_;
};

void write_outcome_csv_header(std::ostream& out);
void write_outcome_csv(std::ostream& out, const SlotOutcome& o);

}  // namespace qnet
