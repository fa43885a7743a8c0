#include "qnet/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "qnet/io.hpp"

namespace qnet {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir);
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

}  // namespace

int cmd_generate(const SimConfig& config, const std::string& out_dir, std::ostream& log) {
  SimConfig topology_fields = config;
  topology_fields.pairs = 1;
  topology_fields.fixed_pairs.clear();
  try {
    validate(topology_fields);
  } catch (const ConfigError& e) {
    log << "invalid config: " << e.what() << '\n';
    return kExitValidation;
  }
  try {
    ensure_dir(out_dir);
    Topology topo = generate_waxman(waxman_params(config));
    write_text_file(join(out_dir, "topology.json"), topology_to_json(topo).dump(1) + "\n");
    std::ostringstream dot;
    write_dot(dot, topo);
    write_text_file(join(out_dir, "topology.dot"), dot.str());
    log << "nodes " << topo.node_count() << " edges " << topo.edge_count() << " channels "
        << topo.channel_count() << "\nE_d " << topo.mean_degree() << " E_p " << topo.mean_success_rate()
        << " alpha " << topo.alpha() << '\n';
    return kExitOk;
  } catch (const CalibrationError& e) {
    log << "calibration failed: " << e.what() << "\nclosest E_d " << e.achieved_degree << " closest E_p "
        << e.achieved_rate << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cmd_run(const SimConfig& config, const std::string& topology_file, const std::string& out_dir,
            bool export_plans, std::ostream& log) {
  Topology topo;
  try {
    validate(config);
    if (!topology_file.empty()) {
      topo = topology_from_json(read_json_file(topology_file));
      if (topo.node_count() != config.n)
        throw ConfigError("n", "config has " + std::to_string(config.n) + " nodes but the topology has " +
                                   std::to_string(topo.node_count()));
    }
  } catch (const ConfigError& e) {
    log << "invalid config: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    log << "cannot load topology: " << e.what() << '\n';
    return kExitValidation;
  }
  try {
    ensure_dir(out_dir);
    if (topology_file.empty()) topo = generate_waxman(waxman_params(config));
    Simulator sim(std::move(topo), config);
    std::ofstream csv(join(out_dir, "outcomes.csv"), std::ios::binary);
    write_outcome_csv_header(csv);
    std::vector<SlotOutcome> outcomes;
    if (export_plans) ensure_dir(join(out_dir, "plans"));
    for (int s = 0; s < config.slots; ++s) {
      SlotTrace t = sim.trace_slot(s);
      write_outcome_csv(csv, t.outcome);
      if (export_plans)
        write_text_file(join(join(out_dir, "plans"), "slot_" + std::to_string(s) + ".json"),
                        slot_trace_to_json(t).dump(1) + "\n");
      outcomes.push_back(std::move(t.outcome));
    }
    if (!csv) throw std::runtime_error("write failed for outcomes.csv");
    Json summary{{"config", config_to_json(config)}, {"h_m", sim.h_m()}};
    if (!outcomes.empty()) {
      summary["result"] = result_to_json(aggregate(outcomes));
      log << "mean eps " << summary["result"]["mean_eps"].get<double>() << " over " << outcomes.size()
          << " slots\n";
    } else {
      log << "no slots run\n";
    }
    write_text_file(join(out_dir, "summary.json"), summary.dump(1) + "\n");
    return kExitOk;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cmd_fixtures(std::ostream& log) {
  using namespace fixture_node;
  int failures = 0;
  auto check = [&](const std::string& name, bool ok, const std::string& detail) {
    log << (ok ? "ok    " : "FAIL  ") << name << (ok ? "" : "  (" + detail + ")") << '\n';
    if (!ok) ++failures;
  };
  auto nodes_text = [](const std::vector<NodeId>& nodes) {
    std::string s;
    for (NodeId v : nodes) s += (s.empty() ? "" : ",") + std::to_string(v);
    return s;
  };

  {
    Fixture f = fixture_appendix(1);
    Residual res(f.topology);
    const SdPair pair{f.source, f.destination};
    auto sel = greedy_eda(f.topology, res, std::span(&pair, 1), {MetricKind::Ext, f.swap_rate}, kNoHopLimit);
    int total = 0;
    for (const auto& p : sel) total += p.path.width;
    const bool red = sel.size() == 1 && sel[0].path.nodes == std::vector<NodeId>{S, A, B, T};
    check("example 1: G-EDA selects only the red path", red,
          std::to_string(sel.size()) + " paths, first " + (sel.empty() ? "-" : nodes_text(sel[0].path.nodes)));
    check("example 1: G-EDA total width 3", total == 3, "got " + std::to_string(total));
    const int flow = max_flow_width(f.topology, Residual(f.topology), f.source, f.destination);
    check("example 1: max-flow width 6", flow == 6, "got " + std::to_string(flow));
  }
  {
    Fixture f = fixture_appendix(2);
    Residual res(f.topology);
    const SdPair pair{f.source, f.destination};
    auto sel = greedy_eda(f.topology, res, std::span(&pair, 1), {MetricKind::Ext, f.swap_rate}, kNoHopLimit);
    const bool red = !sel.empty() && sel[0].path.nodes == std::vector<NodeId>{S, A, B, T} && sel[0].path.width == 2;
    check("example 2: first selection is the red 2-path", red,
          sel.empty() ? "nothing selected" : nodes_text(sel[0].path.nodes) + " W=" + std::to_string(sel[0].path.width));
    const double first = sel.empty() ? 0.0 : sel[0].score.primary;
    const double singles = ext(hop_rates(f.topology, std::vector<NodeId>{S, A, B, T}), 1, 1.0) +
                           ext(hop_rates(f.topology, std::vector<NodeId>{S, C, A, E, T}), 1, 1.0) +
                           ext(hop_rates(f.topology, std::vector<NodeId>{S, D, B, F, T}), 1, 1.0);
    std::ostringstream d;
    d << std::setprecision(10) << "first " << first << ", singles " << singles;
    check("example 2: red EXT 0.63936", std::abs(first - 0.63936) < 1e-9, d.str());
    check("example 2: three singles total 0.4752", std::abs(singles - 0.4752) < 1e-9, d.str());
    check("example 2: red beats three singles", first > singles, d.str());
  }
  log << (failures ? "fixtures FAILED\n" : "all fixtures passed\n");
  return failures ? kExitMismatch : kExitOk;
}

int cmd_sweep(SweepDimension dim, const std::vector<double>& values, const SimConfig& base, int topologies,
              const std::string& out_dir, const std::string& checkpoint, std::ostream& log) {
  if (values.empty()) {
    log << "invalid sweep: empty value list\n";
    return kExitValidation;
  }
  try {
    validate(base);
    for (double v : values) validate(with_value(base, dim, v));
    if (topologies < 1) throw ConfigError("topologies", "must be >= 1");
  } catch (const ConfigError& e) {
    log << "invalid config: " << e.what() << '\n';
    return kExitValidation;
  }
  try {
    ensure_dir(out_dir);
    SweepOptions opt;
    opt.topologies = topologies;
    opt.workers = worker_count(1);
    opt.checkpoint = checkpoint.empty() ? join(out_dir, "checkpoint.json") : checkpoint;
    opt.progress = [&](const SweepCell& c, int done, int total) {
      log << "[" << done << "/" << total << "] " << to_string(dim) << "=" << c.value << " "
          << (c.ok ? "mean eps " + std::to_string(c.result.mean_eps) : "failed: " + c.error) << '\n';
    };
    auto cells = sweep(dim, values, base, opt);
    const std::string stem = std::string("sweep_") + to_string(dim);
    write_text_file(join(out_dir, stem + ".csv"), sweep_csv(dim, cells));
    write_text_file(join(out_dir, stem + ".json"), sweep_json(dim, base, cells).dump(1) + "\n");
    write_text_file(join(out_dir, stem + "_plot.json"), sweep_plot_data(dim, cells).dump(1) + "\n");
    return kExitOk;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "inf" || item == "∞") {
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    std::size_t used = 0;
    double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad sweep value '" + item + "'");
    out.push_back(v);
  }
  return out;
}

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entanglement routing simulator"};
  app.require_subcommand(1);

  std::string config_file, out_dir = "out", topology_file, algorithm, metric, k_text, values_text, checkpoint;
  std::string recovery_text, fairness_text;
  std::uint64_t seed = 0, topology_seed = 0;
  int slots = 0, n = 0, m = 0, topologies = 10;
  double q = 0.0, ep = 0.0, ed = 0.0;
  bool export_plans = false, distributed = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_file, "JSON config file");
    sub->add_option("--seed", seed, "simulation seed");
    sub->add_option("--topology-seed", topology_seed, "topology generator seed");
    sub->add_option("--n", n, "node count");
    sub->add_option("--E_p", ep, "target mean channel success rate");
    sub->add_option("--E_d", ed, "target mean degree");
    sub->add_option("-o,--out", out_dir, "output directory");
  };
  auto add_sim = [&](CLI::App* sub) {
    sub->add_option("--slots", slots, "time slots");
    sub->add_option("--algorithm", algorithm, "qcast | qpass | slmp | greedy");
    sub->add_option("--metric", metric, "Q-PASS metric: ext | sumdist | cr | botcap");
    sub->add_option("--recovery", recovery_text, "on | off");
    sub->add_option("--fairness", fairness_text, "on | off");
    sub->add_option("--k", k_text, "link-state range (integer or inf)");
    sub->add_option("--m", m, "S-D pairs per slot");
    sub->add_option("--q", q, "swap success rate");
    sub->add_flag("--distributed", distributed, "take P4 decisions per node from k-hop views");
  };

  auto* gen = app.add_subcommand("generate", "generate a calibrated topology");
  add_common(gen);
  auto* run = app.add_subcommand("run", "simulate time slots");
  add_common(run);
  add_sim(run);
  run->add_option("-t,--topology", topology_file, "topology JSON (generated when omitted)");
  run->add_flag("--export-plans", export_plans, "write per-slot plan JSON");
  auto* sw = app.add_subcommand("sweep", "sweep one dimension");
  add_common(sw);
  add_sim(sw);
  std::string dim_text;
  sw->add_option("--dimension", dim_text, "n | E_p | q | k | E_d | m")->required();
  sw->add_option("--values", values_text, "comma separated values, inf allowed for k")->required();
  sw->add_option("--topologies", topologies, "networks per cell");
  sw->add_option("--checkpoint", checkpoint, "checkpoint file (default <out>/checkpoint.json)");
  auto* fix = app.add_subcommand("fixtures", "check the counterexample fixtures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitValidation;
  }

  if (fix->parsed()) return cmd_fixtures(out);

  CLI::App* sub = gen->parsed() ? gen : run->parsed() ? run : sw;
  SimConfig config;
  try {
    if (!config_file.empty()) config = config_from_json(read_json_file(config_file));
    auto given = [&](const char* name) { return sub->count(name) > 0; };
    if (given("--seed")) config.seed = seed;
    if (given("--topology-seed")) config.topology_seed = topology_seed;
    if (given("--n")) config.n = n;
    if (given("--E_p")) config.target_rate = ep;
    if (given("--E_d")) config.target_degree = ed;
    if (sub != gen) {
      if (given("--slots")) config.slots = slots;
      if (given("--algorithm")) config = config_from_json(Json{{"algorithm", algorithm}}, config);
      if (given("--metric")) config = config_from_json(Json{{"metric", metric}}, config);
      if (given("--m")) config.pairs = m;
      if (given("--q")) config.swap_rate = q;
      if (given("--distributed")) config.distributed = distributed;
      if (given("--k")) {
        Json k = k_text == "inf" ? Json("inf") : Json(std::stoi(k_text));
        config = config_from_json(Json{{"k", k}}, config);
      }
      auto on_off = [](const std::string& text, const char* field) {
        if (text == "on") return true;
        if (text == "off") return false;
        throw ConfigError(field, "must be on or off");
      };
      if (given("--recovery")) config.recovery = on_off(recovery_text, "recovery");
      if (given("--fairness")) config.fairness = on_off(fairness_text, "fairness");
    }
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "invalid config: " << e.what() << '\n';
    return kExitValidation;
  }

  if (gen->parsed()) return cmd_generate(config, out_dir, out);
  if (run->parsed()) return cmd_run(config, topology_file, out_dir, export_plans, out);

  std::vector<double> values;
  SweepDimension dim;
  try {
    dim = dimension_from_string(dim_text);
    values = parse_values(values_text);
  } catch (const std::exception& e) {
    err << "invalid sweep: " << e.what() << '\n';
    return kExitValidation;
  }
  return cmd_sweep(dim, values, config, topologies, out_dir, checkpoint, out);
}

}  // namespace qnet
