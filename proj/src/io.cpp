#include "qnet/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <regex>
#include <set>
#include <sstream>

namespace qnet {

Json topology_to_json(const Topology& topo) {
  Json nodes = Json::array(), edges = Json::array();
  for (const auto& n : topo.nodes())
    nodes.push_back({{"id", n.id}, {"x", n.position.x}, {"y", n.position.y}, {"qubits", n.qubit_capacity}});
  for (const auto& e : topo.edges())
    edges.push_back({{"id", e.id},
                     {"u", e.u},
                     {"v", e.v},
                     {"length", e.length},
                     {"p", e.success_rate},
                     {"channels", e.channels}});
  return {{"alpha", topo.alpha()}, {"nodes", nodes}, {"edges", edges}};
}

Topology topology_from_json(const Json& j) {
  std::vector<Node> nodes;
  for (const auto& n : j.at("nodes"))
    nodes.push_back({n.at("id").get<int>(), {n.at("x").get<double>(), n.at("y").get<double>()},
                     n.at("qubits").get<int>()});
  Topology topo(std::move(nodes), j.at("alpha").get<double>());
  for (const auto& e : j.at("edges")) {
    const auto channels = e.at("channels").get<std::vector<int>>();
    const EdgeId id = topo.add_edge(e.at("u").get<int>(), e.at("v").get<int>(), e.at("length").get<double>(),
                                    static_cast<int>(channels.size()), e.at("p").get<double>());
    if (id != e.at("id").get<int>() || topo.edge(id).channels != channels)
      throw std::invalid_argument("topology JSON: edge and channel ids must be dense and in order");
  }
  return topo;
}

namespace {

std::string exact(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& s) {
  double x = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return x;
}

std::map<std::string, std::string> attributes(const std::string& body) {
  static const std::regex attr(R"re((\w+)="([^"]*)")re");
  std::map<std::string, std::string> out;
  for (auto it = std::sregex_iterator(body.begin(), body.end(), attr); it != std::sregex_iterator(); ++it)
    out[(*it)[1]] = (*it)[2];
  return out;
}

}  // namespace

void write_dot(std::ostream& out, const Topology& topo) {
  out << "graph qnet {\n";
  out << "  graph [alpha=\"" << exact(topo.alpha()) << "\"];\n";
  for (const auto& n : topo.nodes())
    out << "  " << n.id << " [pos=\"" << exact(n.position.x) << ',' << exact(n.position.y) << "\", qubits=\""
        << n.qubit_capacity << "\"];\n";
  for (const auto& e : topo.edges())
    out << "  " << e.u << " -- " << e.v << " [length=\"" << exact(e.length) << "\", p=\"" << exact(e.success_rate)
        << "\", width=\"" << e.width() << "\", label=\"W=" << e.width() << "\"];\n";
  out << "}\n";
}

Topology read_dot(std::istream& in) {
  static const std::regex graph_line(R"re(^\s*graph\s*\[(.*)\];\s*$)re");
  static const std::regex node_line(R"re(^\s*(\d+)\s*\[(.*)\];\s*$)re");
  static const std::regex edge_line(R"re(^\s*(\d+)\s*--\s*(\d+)\s*\[(.*)\];\s*$)re");
  double alpha = 0.0;
  std::vector<Node> nodes;
  struct Pending {
    int u, v, width;
    double length, p;
  };
  std::vector<Pending> edges;
  std::string line;
  std::smatch m;
  while (std::getline(in, line)) {
    if (std::regex_match(line, m, graph_line)) {
      alpha = parse_double(attributes(m[1]).at("alpha"));
    } else if (std::regex_match(line, m, edge_line)) {
      auto a = attributes(m[3]);
      edges.push_back({std::stoi(m[1]), std::stoi(m[2]), std::stoi(a.at("width")), parse_double(a.at("length")),
                       parse_double(a.at("p"))});
    } else if (std::regex_match(line, m, node_line)) {
      auto a = attributes(m[2]);
      const std::string pos = a.at("pos");
      const auto comma = pos.find(',');
      nodes.push_back({std::stoi(m[1]),
                       {parse_double(pos.substr(0, comma)), parse_double(pos.substr(comma + 1))},
                       std::stoi(a.at("qubits"))});
    }
  }
  Topology topo(std::move(nodes), alpha);
  for (const auto& e : edges) topo.add_edge(e.u, e.v, e.length, e.width, e.p);
  return topo;
}

namespace {

Json path_json(const ReservedPath& p) {
  Json j{{"role", to_string(p.role)},
         {"pair", p.pair_index},
         {"nodes", p.path.nodes},
         {"width", p.path.width},
         {"channels", p.hop_channels}};
  if (p.role == PathRole::Recovery) {
    j["host_major"] = p.host_major;
    j["span"] = {p.span_begin, p.span_end};
  }
  return j;
}

}  // namespace

Json plan_to_json(const RoutingPlan& plan) {
  Json j{{"majors", Json::array()}, {"recoveries", Json::array()}, {"partials", Json::array()}};
  for (const auto& p : plan.majors) j["majors"].push_back(path_json(p));
  for (const auto& p : plan.recoveries) j["recoveries"].push_back(path_json(p));
  for (const auto& p : plan.partials) j["partials"].push_back(path_json(p));
  j["bound_channels"] = plan.bound_channels;
  return j;
}

Json slot_trace_to_json(const SlotTrace& t) {
  Json pairs = Json::array(), swaps = Json::array(), up = Json::array();
  for (const auto& p : t.outcome.pairs) pairs.push_back({p.source, p.destination});
  for (const auto& s : t.swaps) swaps.push_back({s.node, s.first, s.second});
  for (ChannelId c : t.plan.bound_channels)
    if (t.links[c]) up.push_back(c);
  return {{"slot", t.outcome.slot}, {"pairs", pairs},          {"plan", plan_to_json(t.plan)},
          {"links_up", up},         {"swaps", swaps},          {"ebits", t.outcome.ebits}};
}

Json table_to_json(const OfflinePathTable& table) {
  Json entries = Json::array();
  for (const auto& [key, e] : table.entries()) {
    if (!e.ready) continue;
    Json paths = Json::array();
    for (const auto& p : e.paths) paths.push_back({{"nodes", p.nodes}, {"width", p.width}});
    entries.push_back({{"a", key.first}, {"b", key.second}, {"L", e.yen_count}, {"paths", paths}});
  }
  return {{"metric", to_string(table.metric().kind)},
          {"q", table.metric().swap_rate},
          {"initial_L", table.initial_count()},
          {"entries", entries}};
}

OfflinePathTable table_from_json(const Json& j) {
  OfflinePathTable table({metric_from_string(j.at("metric").get<std::string>()), j.at("q").get<double>()},
                         j.at("initial_L").get<int>());
  for (const auto& e : j.at("entries")) {
    OfflinePathTable::Entry entry;
    entry.yen_count = e.at("L").get<int>();
    entry.ready = true;
    for (const auto& p : e.at("paths"))
      entry.paths.push_back({p.at("nodes").get<std::vector<NodeId>>(), p.at("width").get<int>()});
    table.set_entry(e.at("a").get<int>(), e.at("b").get<int>(), std::move(entry));
  }
  return table;
}

namespace {

template <typename T>
T field(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(key, "has the wrong type");
  }
}

}  // namespace

SimConfig config_from_json(const Json& j, SimConfig c) {
  if (!j.is_object()) throw ConfigError("config", "must be a JSON object");
  static const std::set<std::string> known{"n",     "E_p",      "q",         "k",    "E_d",
                                           "m",     "algorithm", "metric",   "slots", "recovery",
                                           "fairness", "seed",   "topology_seed", "h_m", "distributed",
                                           "fixed_pairs"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError(key, "unknown configuration key");
  if (j.contains("n")) c.n = field<int>(j, "n");
  if (j.contains("E_p")) c.target_rate = field<double>(j, "E_p");
  if (j.contains("q")) c.swap_rate = field<double>(j, "q");
  if (j.contains("k")) {
    if (j["k"].is_string()) {
      if (j["k"] != "inf") throw ConfigError("k", "must be an integer or \"inf\"");
      c.k = kInfiniteRange;
    } else {
      c.k = field<int>(j, "k");
    }
  }
  if (j.contains("E_d")) c.target_degree = field<double>(j, "E_d");
  if (j.contains("m")) c.pairs = field<int>(j, "m");
  try {
    if (j.contains("algorithm")) c.algorithm = algorithm_from_string(field<std::string>(j, "algorithm"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("algorithm", e.what());
  }
  try {
    if (j.contains("metric")) c.metric = metric_from_string(field<std::string>(j, "metric"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("metric", e.what());
  }
  if (j.contains("slots")) c.slots = field<int>(j, "slots");
  if (j.contains("recovery")) c.recovery = field<bool>(j, "recovery");
  if (j.contains("fairness")) c.fairness = field<bool>(j, "fairness");
  if (j.contains("seed")) c.seed = field<std::uint64_t>(j, "seed");
  if (j.contains("topology_seed")) c.topology_seed = field<std::uint64_t>(j, "topology_seed");
  if (j.contains("h_m")) c.h_m = field<int>(j, "h_m");
  if (j.contains("distributed")) c.distributed = field<bool>(j, "distributed");
  if (j.contains("fixed_pairs")) {
    c.fixed_pairs.clear();
    for (const auto& p : field<std::vector<std::vector<int>>>(j, "fixed_pairs")) {
      if (p.size() != 2) throw ConfigError("fixed_pairs", "each pair needs two node ids");
      c.fixed_pairs.push_back({p[0], p[1]});
    }
  }
  return c;
}

Json config_to_json(const SimConfig& c) {
  Json pairs = Json::array();
  for (const auto& p : c.fixed_pairs) pairs.push_back({p.source, p.destination});
  Json j{{"n", c.n},
         {"E_p", c.target_rate},
         {"q", c.swap_rate},
         {"E_d", c.target_degree},
         {"m", c.pairs},
         {"algorithm", to_string(c.algorithm)},
         {"metric", to_string(c.metric)},
         {"slots", c.slots},
         {"recovery", c.recovery},
         {"fairness", c.fairness},
         {"seed", c.seed},
         {"topology_seed", c.topology_seed},
         {"h_m", c.h_m},
         {"distributed", c.distributed},
         {"fixed_pairs", pairs}};
  if (c.k == kInfiniteRange)
    j["k"] = "inf";
  else
    j["k"] = c.k;
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return Json::parse(in);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace qnet
