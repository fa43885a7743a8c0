#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qnet/engine.hpp"
#include "qnet/stats.hpp"

namespace qnet {

enum ExitCode { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2, kExitMismatch = 3 };

int cmd_generate(const SimConfig& config, const std::string& out_dir, std::ostream& log);

/// Runs config.slots slots on the topology file (or a freshly generated one
/// when `topology_file` is empty) and writes outcomes.csv and summary.json.
int cmd_run(const SimConfig& config, const std::string& topology_file, const std::string& out_dir,
            bool export_plans, std::ostream& log);

int cmd_fixtures(std::ostream& log);

int cmd_sweep(SweepDimension dim, const std::vector<double>& values, const SimConfig& base, int topologies,
              const std::string& out_dir, const std::string& checkpoint, std::ostream& log);

/// Parses a sweep value list such as "0,3,6,inf".
std::vector<double> parse_values(const std::string& text);

/// Full command-line entry point (subcommands generate, run, sweep, fixtures).
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qnet
