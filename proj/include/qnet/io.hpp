#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "qnet/engine.hpp"
#include "qnet/plan.hpp"
#include "qnet/qpass.hpp"
#include "qnet/topology.hpp"

namespace qnet {

using Json = nlohmann::json;

Json topology_to_json(const Topology& topo);
Topology topology_from_json(const Json& j);

/// DOT rendering carrying every stored attribute, so read_dot(write_dot(t)) == t.
void write_dot(std::ostream& out, const Topology& topo);
Topology read_dot(std::istream& in);

Json plan_to_json(const RoutingPlan& plan);
Json slot_trace_to_json(const SlotTrace& trace);

Json table_to_json(const OfflinePathTable& table);
OfflinePathTable table_from_json(const Json& j);

/// Keys mirror SimConfig: n, E_p, q, k ("inf" allowed), E_d, m, algorithm,
/// metric, slots, recovery, fairness, seed, topology_seed, h_m, distributed,
/// fixed_pairs. Missing keys keep `base` values; unknown keys are rejected.
SimConfig config_from_json(const Json& j, SimConfig base = {});
Json config_to_json(const SimConfig& c);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace qnet
