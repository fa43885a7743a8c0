#include "qnet/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace qnet {

double Cdf::at(double x) const {
  auto it = std::upper_bound(points.begin(), points.end(), x,
                             [](double v, const std::pair<double, double>& p) { return v < p.first; });
  return it == points.begin() ? 0.0 : std::prev(it)->second;
}

Cdf empirical_cdf(std::vector<double> values) {
  Cdf cdf;
  if (values.empty()) return cdf;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    if (i + 1 == values.size() || values[i + 1] != values[i])
      cdf.points.emplace_back(values[i], static_cast<double>(i + 1) / n);
  cdf.points.back().second = 1.0;
  return cdf;
}

Cdf average_cdf(std::span<const Cdf> cdfs) {
  std::vector<double> xs;
  std::size_t used = 0;
  for (const auto& c : cdfs) {
    if (c.points.empty()) continue;
    ++used;
    for (const auto& p : c.points) xs.push_back(p.first);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  Cdf out;
  for (double x : xs) {
    double sum = 0.0;
    for (const auto& c : cdfs)
      if (!c.points.empty()) sum += c.at(x);
    out.points.emplace_back(x, sum / static_cast<double>(used));
  }
  if (!out.points.empty()) out.points.back().second = 1.0;
  return out;
}

ExperimentResult aggregate(std::span<const SlotOutcome> outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("aggregate needs at least one slot");
  ExperimentResult r;
  r.slots = static_cast<int>(outcomes.size());
  std::vector<double> per_slot, paths, widths;
  double epairs = 0.0;
  long carrying = 0, detoured = 0;
  for (const auto& o : outcomes) {
    const double e = o.total_ebits();
    per_slot.push_back(e);
    epairs += o.epairs();
    for (std::size_t i = 0; i < o.pairs.size(); ++i) {
      paths.push_back(o.paths[i]);
      if (o.ebits[i] > 0) {
        ++carrying;
        detoured += o.recovery_used[i] ? 1 : 0;
      }
    }
    for (int w : o.recovery_widths) widths.push_back(w);
    r.channels_vs_throughput.emplace_back(o.channels_bound, e);
    if (!o.feasible) ++r.infeasible_slots;
  }
  const double n = static_cast<double>(r.slots);
  double sum = 0.0;
  for (double e : per_slot) sum += e;
  r.mean_eps = sum / n;
  double ss = 0.0;
  for (double e : per_slot) ss += (e - r.mean_eps) * (e - r.mean_eps);
  r.stderr_eps = r.slots > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  r.mean_epairs = epairs / n;
  r.recovery_fraction = carrying ? static_cast<double>(detoured) / static_cast<double>(carrying) : 0.0;
  std::sort(r.channels_vs_throughput.begin(), r.channels_vs_throughput.end());
  r.throughput_cdf = empirical_cdf(std::move(per_slot));
  r.paths_cdf = empirical_cdf(std::move(paths));
  r.recovery_width_cdf = empirical_cdf(std::move(widths));
  return r;
}

ExperimentResult average(std::span<const ExperimentResult> results) {
  if (results.empty()) throw std::invalid_argument("average needs at least one result");
  ExperimentResult r;
  const double n = static_cast<double>(results.size());
  double var = 0.0;
  std::vector<Cdf> tp, pc, rw;
  r.topologies = 0;
  for (const auto& x : results) {
    r.slots += x.slots;
    r.topologies += x.topologies;
    r.mean_eps += x.mean_eps / n;
    r.mean_epairs += x.mean_epairs / n;
    r.recovery_fraction += x.recovery_fraction / n;
    r.infeasible_slots += x.infeasible_slots;
    var += x.stderr_eps * x.stderr_eps;
    tp.push_back(x.throughput_cdf);
    pc.push_back(x.paths_cdf);
    rw.push_back(x.recovery_width_cdf);
    r.channels_vs_throughput.insert(r.channels_vs_throughput.end(), x.channels_vs_throughput.begin(),
                                    x.channels_vs_throughput.end());
  }
  r.stderr_eps = std::sqrt(var) / n;
  std::sort(r.channels_vs_throughput.begin(), r.channels_vs_throughput.end());
  r.throughput_cdf = average_cdf(tp);
  r.paths_cdf = average_cdf(pc);
  r.recovery_width_cdf = average_cdf(rw);
  return r;
}

namespace {

Json cdf_json(const Cdf& c) {
  Json j = Json::array();
  for (const auto& [x, f] : c.points) j.push_back({x, f});
  return j;
}

Cdf cdf_from(const Json& j) {
  Cdf c;
  for (const auto& p : j) c.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return c;
}

}  // namespace

Json result_to_json(const ExperimentResult& r) {
  Json cvt = Json::array();
  for (const auto& [x, y] : r.channels_vs_throughput) cvt.push_back({x, y});
  return {{"slots", r.slots},
          {"topologies", r.topologies},
          {"mean_eps", r.mean_eps},
          {"stderr_eps", r.stderr_eps},
          {"mean_epairs", r.mean_epairs},
          {"recovery_fraction", r.recovery_fraction},
          {"infeasible_slots", r.infeasible_slots},
          {"throughput_cdf", cdf_json(r.throughput_cdf)},
          {"paths_cdf", cdf_json(r.paths_cdf)},
          {"recovery_width_cdf", cdf_json(r.recovery_width_cdf)},
          {"channels_vs_throughput", cvt}};
}

ExperimentResult result_from_json(const Json& j) {
  ExperimentResult r;
  r.slots = j.at("slots").get<int>();
  r.topologies = j.at("topologies").get<int>();
  r.mean_eps = j.at("mean_eps").get<double>();
  r.stderr_eps = j.at("stderr_eps").get<double>();
  r.mean_epairs = j.at("mean_epairs").get<double>();
  r.recovery_fraction = j.at("recovery_fraction").get<double>();
  r.infeasible_slots = j.at("infeasible_slots").get<int>();
  r.throughput_cdf = cdf_from(j.at("throughput_cdf"));
  r.paths_cdf = cdf_from(j.at("paths_cdf"));
  r.recovery_width_cdf = cdf_from(j.at("recovery_width_cdf"));
  for (const auto& p : j.at("channels_vs_throughput"))
    r.channels_vs_throughput.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return r;
}

const char* to_string(SweepDimension d) {
  switch (d) {
    case SweepDimension::N: return "n";
    case SweepDimension::Ep: return "E_p";
    case SweepDimension::Q: return "q";
    case SweepDimension::K: return "k";
    case SweepDimension::Ed: return "E_d";
    case SweepDimension::M: return "m";
  }
  return "?";
}

SweepDimension dimension_from_string(const std::string& name) {
  for (auto d : {SweepDimension::N, SweepDimension::Ep, SweepDimension::Q, SweepDimension::K, SweepDimension::Ed,
                 SweepDimension::M})
    if (name == to_string(d)) return d;
  throw std::invalid_argument("unknown sweep dimension '" + name + "'");
}

SimConfig with_value(SimConfig c, SweepDimension dim, double value) {
  auto integral = [&](const char* field) {
    if (!std::isfinite(value) || value != std::floor(value)) throw ConfigError(field, "must be an integer");
    return static_cast<int>(value);
  };
  switch (dim) {
    case SweepDimension::N: c.n = integral("n"); break;
    case SweepDimension::Ep: c.target_rate = value; break;
    case SweepDimension::Q: c.swap_rate = value; break;
    case SweepDimension::K: c.k = std::isinf(value) ? kInfiniteRange : integral("k"); break;
    case SweepDimension::Ed: c.target_degree = value; break;
    case SweepDimension::M: c.pairs = integral("m"); break;
  }
  return c;
}

ExperimentResult run_experiment(const SimConfig& config, int topologies) {
  if (topologies < 1) throw std::invalid_argument("need at least one topology");
  std::vector<ExperimentResult> per;
  for (int t = 0; t < topologies; ++t) {
    SimConfig c = config;
    c.topology_seed = config.topology_seed + static_cast<std::uint64_t>(t);
    c.seed = config.seed + static_cast<std::uint64_t>(t);
    Simulator sim(generate_waxman(waxman_params(c)), c);
    auto outcomes = sim.run();
    if (outcomes.empty()) throw std::invalid_argument("experiment needs at least one slot");
    per.push_back(aggregate(outcomes));
  }
  return average(per);
}

namespace {

Json value_json(double v) { return std::isinf(v) ? Json("inf") : Json(v); }
double value_from(const Json& j) {
  return j.is_string() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

std::string value_text(double v) {
  if (std::isinf(v)) return "inf";
  std::ostringstream s;
  s << v;
  return s.str();
}

Json cell_json(const SweepCell& c) {
  Json j{{"value", value_json(c.value)}, {"ok", c.ok}};
  if (c.ok)
    j["result"] = result_to_json(c.result);
  else
    j["error"] = c.error;
  return j;
}

}  // namespace

std::vector<SweepCell> sweep(SweepDimension dim, std::span<const double> values, const SimConfig& base,
                             const SweepOptions& options) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  const int total = static_cast<int>(values.size());
  std::vector<SweepCell> cells(total);
  std::vector<char> done(total, 0);
  const Json base_json = config_to_json(base);

  if (!options.checkpoint.empty() && std::filesystem::exists(options.checkpoint)) {
    Json cp = read_json_file(options.checkpoint);
    if (cp.value("dimension", "") == to_string(dim) && cp.value("base", Json()) == base_json &&
        cp.value("topologies", 0) == options.topologies) {
      for (const auto& c : cp.at("cells")) {
        if (!c.at("ok").get<bool>()) continue;
        const double v = value_from(c.at("value"));
        for (int i = 0; i < total; ++i)
          if (!done[i] && (values[i] == v || (std::isinf(values[i]) && std::isinf(v)))) {
            cells[i] = {values[i], true, "", result_from_json(c.at("result"))};
            done[i] = 1;
            break;
          }
      }
    }
  }

  std::mutex mu;
  int finished = static_cast<int>(std::count(done.begin(), done.end(), 1));
  auto save = [&] {
    if (options.checkpoint.empty()) return;
    Json cp{{"dimension", to_string(dim)}, {"base", base_json}, {"topologies", options.topologies},
            {"cells", Json::array()}};
    for (int i = 0; i < total; ++i)
      if (done[i]) cp["cells"].push_back(cell_json(cells[i]));
    const std::string tmp = options.checkpoint + ".tmp";
    write_text_file(tmp, cp.dump(1));
    std::filesystem::rename(tmp, options.checkpoint);
  };

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i; (i = next.fetch_add(1)) < total;) {
      if (done[i]) continue;
      SweepCell cell{values[i], false, "", {}};
      try {
        SimConfig c = with_value(base, dim, values[i]);
        validate(c);
        cell.result = run_experiment(c, options.topologies);
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      std::lock_guard lock(mu);
      cells[i] = std::move(cell);
      done[i] = 1;
      ++finished;
      if (cells[i].ok) save();
      if (options.progress) options.progress(cells[i], finished, total);
    }
  };
  const int workers = std::max(1, std::min(options.workers, total));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return cells;
}

std::string sweep_csv(SweepDimension dim, std::span<const SweepCell> cells) {
  std::ostringstream out;
  out << to_string(dim) << ",ok,mean_eps,stderr_eps,mean_epairs,recovery_fraction,slots,topologies,error\n";
  for (const auto& c : cells) {
    out << value_text(c.value) << ',' << (c.ok ? 1 : 0) << ',';
    if (c.ok)
      out << c.result.mean_eps << ',' << c.result.stderr_eps << ',' << c.result.mean_epairs << ','
          << c.result.recovery_fraction << ',' << c.result.slots << ',' << c.result.topologies << ",\n";
    else
      out << ",,,,,,\"" << c.error << "\"\n";
  }
  return out.str();
}

Json sweep_json(SweepDimension dim, const SimConfig& base, std::span<const SweepCell> cells) {
  Json j{{"dimension", to_string(dim)}, {"base", config_to_json(base)}, {"cells", Json::array()}};
  for (const auto& c : cells) j["cells"].push_back(cell_json(c));
  return j;
}

Json sweep_plot_data(SweepDimension dim, std::span<const SweepCell> cells) {
  Json x = Json::array(), y = Json::array(), err = Json::array();
  for (const auto& c : cells) {
    if (!c.ok) continue;
    x.push_back(value_json(c.value));
    y.push_back(c.result.mean_eps);
    err.push_back(c.result.stderr_eps);
  }
  return {{"x_label", to_string(dim)}, {"y_label", "eps"}, {"x", x}, {"y", y}, {"yerr", err}};
}

int worker_count(int fallback) {
  if (const char* env = std::getenv("QNET_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 256L));
  }
  return fallback;
}

}  // namespace qnet
