#include "qnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qnet {

std::vector<EdgeId> hop_edges(const Topology& topo, std::span<const NodeId> nodes) {
  std::vector<EdgeId> out;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    auto e = topo.edge_between(nodes[i], nodes[i + 1]);
    if (!e) throw std::invalid_argument("path uses a non-existent edge");
    out.push_back(*e);
  }
  return out;
}

std::vector<double> hop_rates(const Topology& topo, std::span<const NodeId> nodes) {
  std::vector<double> out;
  for (EdgeId e : hop_edges(topo, nodes)) out.push_back(topo.edge(e).success_rate);
  return out;
}

std::vector<double> hop_count_distribution(int width, double rate) {
  std::vector<double> q(width + 1);
  const double fail = 1.0 - rate;
  double coeff = 1.0;  // C(W, i), updated incrementally
  for (int i = 0; i <= width; ++i) {
    q[i] = coeff * std::pow(rate, i) * std::pow(fail, width - i);
    coeff = coeff * (width - i) / (i + 1);
  }
  return q;
}

ExtPrefix::ExtPrefix(int width) : dist_(width + 1, 0.0) {
  if (width < 1) throw std::invalid_argument("path width must be positive");
  dist_[width] = 1.0;
}

void ExtPrefix::extend(double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("success rate outside [0,1]");
  const int w = width();
  const auto q = hop_count_distribution(w, rate);
  // Suffix sums: sq[i] = sum_{l>=i} Q^l, sp[i] = sum_{l>=i} P^l.
  std::vector<double> sq(w + 2, 0.0), sp(w + 2, 0.0);
  for (int i = w; i >= 0; --i) {
    sq[i] = sq[i + 1] + q[i];
    sp[i] = sp[i + 1] + dist_[i];
  }
  std::vector<double> next(w + 1, 0.0);
  double positive = 0.0;
  for (int i = 1; i <= w; ++i) {
    next[i] = dist_[i] * sq[i] + q[i] * sp[i + 1];
    positive += next[i];
  }
  next[0] = std::max(0.0, 1.0 - positive);
  dist_ = std::move(next);
  ++hops_;
}

double ExtPrefix::expected_width() const {
  double e = 0.0;
  for (int i = 1; i <= width(); ++i) e += i * dist_[i];
  return e;
}

std::vector<double> ext_distribution(std::span<const double> per_hop_rates, int width) {
  if (per_hop_rates.empty()) throw std::invalid_argument("path needs at least one hop");
  ExtPrefix prefix(width);
  for (double p : per_hop_rates) prefix.extend(p);
  return prefix.distribution();
}

double ext(std::span<const double> per_hop_rates, int width, double swap_rate) {
  if (!(swap_rate >= 0.0 && swap_rate <= 1.0)) throw std::invalid_argument("swap rate outside [0,1]");
  ExtPrefix prefix(width);
  for (double p : per_hop_rates) prefix.extend(p);
  return std::pow(swap_rate, static_cast<double>(per_hop_rates.size())) * prefix.expected_width();
}

double ext(const Topology& topo, const Path& path, double swap_rate) {
  return ext(hop_rates(topo, path.nodes), path.width, swap_rate);
}

double sum_dist(const Topology& topo, const Path& path) {
  double total = 0.0;
  for (EdgeId e : hop_edges(topo, path.nodes)) total += topo.edge(e).length;
  return total;
}

double creation_rate(const Topology& topo, const Path& path) {
  double total = 0.0;
  for (double p : hop_rates(topo, path.nodes)) {
    if (p <= 0.0) return std::numeric_limits<double>::infinity();
    total += 1.0 / p;
  }
  return total;
}

BotCapCost bot_cap(const Topology& topo, const Path& path) {
  return {-path.width, creation_rate(topo, path)};
}

const char* to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Ext: return "ext";
    case MetricKind::SumDist: return "sumdist";
    case MetricKind::CreationRate: return "cr";
    case MetricKind::BotCap: return "botcap";
  }
  return "?";
}

MetricKind metric_from_string(const std::string& name) {
  if (name == "ext") return MetricKind::Ext;
  if (name == "sumdist") return MetricKind::SumDist;
  if (name == "cr") return MetricKind::CreationRate;
  if (name == "botcap") return MetricKind::BotCap;
  throw std::invalid_argument("unknown metric '" + name + "'");
}

PathScore score_path(const MetricEvaluator& eval, const Topology& topo, const Path& path) {
  switch (eval.kind) {
    case MetricKind::Ext: return {ext(topo, path, eval.swap_rate), 0.0};
    case MetricKind::SumDist: return {-sum_dist(topo, path), 0.0};
    case MetricKind::CreationRate: return {-creation_rate(topo, path), 0.0};
    case MetricKind::BotCap: return {static_cast<double>(path.width), -creation_rate(topo, path)};
  }
  return {};
}

PathScore boost_score(const PathScore& s, MetricKind kind, double factor) {
  switch (kind) {
    case MetricKind::Ext: return {s.primary * factor, s.secondary};
    case MetricKind::SumDist:
    case MetricKind::CreationRate: return {s.primary / factor, s.secondary};
    case MetricKind::BotCap: return {s.primary * factor, s.secondary / factor};
  }
  return s;
}

Residual::Residual(const Topology& topo)
    : qubits_(topo.node_count()), channels_(topo.edge_count()), bound_(topo.channel_count(), 0) {
  for (const auto& n : topo.nodes()) qubits_[n.id] = n.qubit_capacity;
  for (const auto& e : topo.edges()) channels_[e.id] = e.width();
}

Residual Residual::static_widths(const Topology& topo) {
  Residual r(topo);
  std::fill(r.qubits_.begin(), r.qubits_.end(), kUnlimited);
  return r;
}

std::vector<std::vector<ChannelId>> Residual::reserve(const Topology& topo,
                                                      std::span<const NodeId> nodes, int width) {
  if (width < 1) throw std::logic_error("reservation width must be positive");
  if (path_width(topo, *this, nodes) < width) throw std::logic_error("reservation exceeds residual");
  std::vector<std::vector<ChannelId>> bound;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const Edge& e = topo.edge(*topo.edge_between(nodes[i], nodes[i + 1]));
    qubits_[nodes[i]] -= width;
    qubits_[nodes[i + 1]] -= width;
    channels_[e.id] -= width;
    std::vector<ChannelId> hop;
    for (ChannelId c : e.channels) {
      if (static_cast<int>(hop.size()) == width) break;
      if (!bound_[c]) {
        bound_[c] = 1;
        hop.push_back(c);
      }
    }
    bound.push_back(std::move(hop));
  }
  return bound;
}

int path_width(const Topology& topo, const Residual& residual, std::span<const NodeId> nodes) {
  if (nodes.size() < 2) return 0;
  int w = std::min(residual.free_qubits(nodes.front()), residual.free_qubits(nodes.back()));
  for (std::size_t i = 1; i + 1 < nodes.size(); ++i) w = std::min(w, residual.free_qubits(nodes[i]) / 2);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    auto e = topo.edge_between(nodes[i], nodes[i + 1]);
    if (!e) return 0;
    w = std::min(w, residual.free_channels(*e));
  }
  return std::max(w, 0);
}

}  // namespace qnet
