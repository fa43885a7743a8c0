#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qnet/engine.hpp"
#include "qnet/io.hpp"

namespace qnet {

/// Right-continuous empirical step CDF: points (x, F(x)) at each distinct
/// value, strictly increasing in x, ending at F = 1.
struct Cdf {
  std::vector<std::pair<double, double>> points;
  double at(double x) const;
};

Cdf empirical_cdf(std::vector<double> values);
/// Pointwise mean of step functions, evaluated on the union of their supports.
Cdf average_cdf(std::span<const Cdf> cdfs);

struct ExperimentResult {
  int slots = 0;
  int topologies = 1;
  double mean_eps = 0.0;
  double stderr_eps = 0.0;
  double mean_epairs = 0.0;
  double recovery_fraction = 0.0;  // share of ebit-carrying pair-slots that used a detour
  int infeasible_slots = 0;
  Cdf throughput_cdf;        // per-slot total ebits
  Cdf paths_cdf;             // per pair-slot reserved path width
  Cdf recovery_width_cdf;    // recovery or partial path widths
  std::vector<std::pair<double, double>> channels_vs_throughput;  // per slot
};

/// Throws std::invalid_argument on an empty stream.
ExperimentResult aggregate(std::span<const SlotOutcome> outcomes);
/// Equal-weight average of per-topology results.
ExperimentResult average(std::span<const ExperimentResult> results);

Json result_to_json(const ExperimentResult& r);
ExperimentResult result_from_json(const Json& j);

enum class SweepDimension { N, Ep, Q, K, Ed, M };
const char* to_string(SweepDimension d);
SweepDimension dimension_from_string(const std::string& name);
/// Copy of `base` with the dimension set to `value` (infinity for k = inf).
SimConfig with_value(SimConfig base, SweepDimension dim, double value);

struct SweepCell {
  double value = 0.0;
  bool ok = false;
  std::string error;
  ExperimentResult result;
};

struct SweepOptions {
  int topologies = 10;
  int workers = 1;
  std::string checkpoint;  // empty: none
  std::function<void(const SweepCell&, int done, int total)> progress;
};

/// Runs every cell over `topologies` generated networks (topology and
/// simulation seeds offset by the topology index) and averages them. Cells
/// already present in the checkpoint for the same base config are reused.
std::vector<SweepCell> sweep(SweepDimension dim, std::span<const double> values, const SimConfig& base,
                             const SweepOptions& options);

/// One cell: `topologies` networks averaged with equal weight.
ExperimentResult run_experiment(const SimConfig& config, int topologies);

std::string sweep_csv(SweepDimension dim, std::span<const SweepCell> cells);
Json sweep_json(SweepDimension dim, const SimConfig& base, std::span<const SweepCell> cells);
/// x/y series with standard errors, ready for any plotting tool.
Json sweep_plot_data(SweepDimension dim, std::span<const SweepCell> cells);

/// QNET_WORKERS if set and positive, else `fallback`.
int worker_count(int fallback = 1);

}  // namespace qnet
