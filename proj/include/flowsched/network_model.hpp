#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <iomanip>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "flowsched/error.hpp"
#include "flowsched/random.hpp"

namespace flowsched {

using VertexId = std::size_t;
using EdgeId = std::size_t;
using CommodityId = std::size_t;

// A path is the ordered list of edges walked from a commodity's source.
using Path = std::vector<EdgeId>;

struct Edge {
  VertexId u = 0;
  VertexId v = 0;
};

// Undirected multigraph. Parallel edges are allowed, self-loops are not.
class Topology {
 public:
  Topology() = default;
  explicit Topology(std::size_t num_vertices) : incident_(num_vertices) {}

  EdgeId add_edge(VertexId u, VertexId v) {
    if (u >= num_vertices() || v >= num_vertices() || u == v) {
      throw Error(ErrorKind::InvalidArgument, "edge endpoints must be two distinct known vertices");
    }
    edges_.push_back({u, v});
    const EdgeId id = edges_.size() - 1;
    incident_[u].push_back(id);
    incident_[v].push_back(id);
    return id;
  }

  std::size_t num_vertices() const { return incident_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const Edge& edge(EdgeId e) const {
    if (e >= edges_.size()) {
      throw Error(ErrorKind::UnknownEdge, "unknown edge id " + std::to_string(e));
    }
    return edges_[e];
  }

  std::span<const EdgeId> incident(VertexId v) const { return incident_.at(v); }

  VertexId other_end(EdgeId e, VertexId from) const {
    const Edge& ed = edge(e);
    if (ed.u == from) return ed.v;
    if (ed.v == from) return ed.u;
    throw Error(ErrorKind::InvalidPath,
                "edge " + std::to_string(e) + " is not incident to vertex " + std::to_string(from));
  }

  bool adjacent(VertexId a, VertexId b) const {
    for (EdgeId e : incident_.at(a)) {
      if (other_end(e, a) == b) return true;
    }
    return false;
  }

  bool connected(VertexId a, VertexId b) const {
    std::vector<bool> seen(num_vertices(), false);
    std::deque<VertexId> queue{a};
    seen.at(a) = true;
    while (!queue.empty()) {
      const VertexId x = queue.front();
      queue.pop_front();
      if (x == b) return true;
      for (EdgeId e : incident_[x]) {
        const VertexId y = other_end(e, x);
        if (!seen[y]) {
          seen[y] = true;
          queue.push_back(y);
        }
      }
    }
    return false;
  }

  // Vertex sequence visited by `path` starting at `source`, or nullopt if the
  // edges are not contiguous.
  std::optional<std::vector<VertexId>> walk(VertexId source, const Path& path) const {
    std::vector<VertexId> vertices{source};
    VertexId at = source;
    for (EdgeId e : path) {
      if (e >= edges_.size()) return std::nullopt;
      const Edge& ed = edges_[e];
      if (ed.u == at) {
        at = ed.v;
      } else if (ed.v == at) {
        at = ed.u;
      } else {
        return std::nullopt;
      }
      vertices.push_back(at);
    }
    return vertices;
  }

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> incident_;
};

enum class NoiseFamily { None, Uniform, TwoPoint };

inline const char* to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::None: return "none";
    case NoiseFamily::Uniform: return "uniform";
    case NoiseFamily::TwoPoint: return "two_point";
  }
  return "none";
}

// Zero-mean noise with support [-w, w]. `per_load` optionally overrides the
// half-width for loads 1..K (index load-1).
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::None;
  double half_width = 0.0;
  std::vector<double> per_load;

  double half_width_at(int load) const {
    if (load >= 1 && static_cast<std::size_t>(load) <= per_load.size()) {
      return per_load[load - 1];
    }
    return half_width;
  }

  double variance_at(int load) const {
    const double w = half_width_at(load);
    switch (family) {
      case NoiseFamily::None: return 0.0;
      case NoiseFamily::Uniform: return w * w / 3.0;
      case NoiseFamily::TwoPoint: return w * w;
    }
    return 0.0;
  }

  template <class Engine>
  double sample(int load, Engine& rng) const {
    const double w = half_width_at(load);
    if (family == NoiseFamily::None || w == 0.0) return 0.0;
    if (family == NoiseFamily::Uniform) {
      return std::uniform_real_distribution<double>(-w, w)(rng);
    }
    return std::bernoulli_distribution(0.5)(rng) ? w : -w;
  }
};

// Expected edge cost as a polynomial in the load. Coefficients are stored
// highest degree first: {a, a1, ..., ad} means a*f^d + a1*f^(d-1) + ... + ad.
struct EdgeCostModel {
  std::vector<double> coefficients;
  NoiseSpec noise;

  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
  double leading() const { return coefficients.front(); }
  double constant_term() const { return coefficients.back(); }

  double evaluate(double load) const {
    double acc = 0.0;
    for (double c : coefficients) acc = acc * load + c;
    return acc;
  }
};

struct Commodity {
  VertexId source = 0;
  VertexId target = 0;
};

// Unvalidated scenario description; build_instance() turns it into an
// Instance or rejects it.
struct EdgeSpec {
  std::string name;
  std::string u;
  std::string v;
  std::vector<double> coefficients;
  NoiseSpec noise;
};

struct CommoditySpec {
  std::string source;
  std::string target;
};

struct ScenarioConfig {
  std::vector<std::string> vertices;
  std::vector<EdgeSpec> edges;
  std::vector<CommoditySpec> commodities;
  std::uint64_t seed = 0;
};

class Instance;
Instance build_instance(const ScenarioConfig& config);

// Immutable, validated problem description. Expected costs for every edge at
// every realizable load 0..K are tabulated at construction.
class Instance {
 public:
  const Topology& topology() const { return topology_; }
  std::size_t num_vertices() const { return topology_.num_vertices(); }
  std::size_t num_edges() const { return topology_.num_edges(); }
  std::size_t num_commodities() const { return commodities_.size(); }
  int max_load() const { return static_cast<int>(commodities_.size()); }
  std::uint64_t seed() const { return seed_; }

  const Commodity& commodity(CommodityId k) const {
    if (k >= commodities_.size()) {
      throw Error(ErrorKind::UnknownCommodity, "unknown commodity " + std::to_string(k));
    }
    return commodities_[k];
  }

  const EdgeCostModel& cost_model(EdgeId e) const {
    check_edge(e);
    return models_[e];
  }

  const std::string& vertex_name(VertexId v) const { return vertex_names_.at(v); }
  const std::string& edge_name(EdgeId e) const {
    check_edge(e);
    return edge_names_[e];
  }

  double expected_edge_cost(EdgeId e, int load) const {
    check_edge(e);
    if (load < 0 || load > max_load()) {
      throw Error(ErrorKind::LoadOutOfRange,
                  "load " + std::to_string(load) + " outside 0.." + std::to_string(max_load()));
    }
    return cost_table_[e][load];
  }

  // Expected cost of edge e for loads 0..K.
  std::span<const double> cost_table(EdgeId e) const {
    check_edge(e);
    return cost_table_[e];
  }

  int max_degree() const {
    int d = 0;
    for (const auto& m : models_) d = std::max(d, m.degree());
    return d;
  }

  // Throws InvalidPath unless `path` is a simple path from s_k to t_k.
  void validate_path(CommodityId k, const Path& path) const {
    const Commodity& c = commodity(k);
    const auto vertices = topology_.walk(c.source, path);
    if (!vertices) {
      throw Error(ErrorKind::InvalidPath, "path for commodity " + std::to_string(k) + " is not contiguous");
    }
    if (vertices->back() != c.target) {
      throw Error(ErrorKind::InvalidPath,
                  "path for commodity " + std::to_string(k) + " does not end at its destination");
    }
    auto sorted = *vertices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(ErrorKind::InvalidPath, "path for commodity " + std::to_string(k) + " repeats a vertex");
    }
  }

  // Stable content hash, used to tag experiment records.
  std::string digest() const {
    std::ostringstream os;
    os << std::setprecision(17) << num_vertices() << ';';
    for (EdgeId e = 0; e < num_edges(); ++e) {
      const Edge& ed = topology_.edge(e);
      os << ed.u << '-' << ed.v << ':';
      for (double c : models_[e].coefficients) os << c << ',';
      os << to_string(models_[e].noise.family) << models_[e].noise.half_width << ';';
    }
    for (const auto& c : commodities_) os << c.source << '>' << c.target << ';';
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(os.str());
    return hex.str();
  }

 private:
  friend Instance build_instance(const ScenarioConfig& config);
  Instance() = default;

  void check_edge(EdgeId e) const {
    if (e >= models_.size()) {
      throw Error(ErrorKind::UnknownEdge, "unknown edge id " + std::to_string(e));
    }
  }

  Topology topology_;
  std::vector<std::string> vertex_names_;
  std::vector<std::string> edge_names_;
  std::vector<EdgeCostModel> models_;
  std::vector<Commodity> commodities_;
  std::vector<std::vector<double>> cost_table_;
  std::uint64_t seed_ = 0;
};

namespace detail {

inline double cost_tolerance(double a, double b) {
  return 1e-12 * (1.0 + std::abs(a) + std::abs(b));
}

}  // namespace detail

inline Instance build_instance(const ScenarioConfig& config) {
  Instance inst;
  if (config.vertices.empty()) {
    throw Error(ErrorKind::MalformedConfig, "scenario has no vertices");
  }
  std::unordered_map<std::string, VertexId> index;
  for (const auto& name : config.vertices) {
    if (!index.emplace(name, index.size()).second) {
      throw Error(ErrorKind::MalformedConfig, "duplicate vertex '" + name + "'");
    }
  }
  auto lookup = [&](const std::string& name, const std::string& where) {
    auto it = index.find(name);
    if (it == index.end()) {
      throw Error(ErrorKind::MalformedConfig, where + " references unknown vertex '" + name + "'");
    }
    return it->second;
  };

  if (config.commodities.empty()) {
    throw Error(ErrorKind::MalformedConfig, "scenario has no commodities");
  }
  const int max_load = static_cast<int>(config.commodities.size());

  inst.topology_ = Topology(config.vertices.size());
  inst.vertex_names_ = config.vertices;
  for (std::size_t i = 0; i < config.edges.size(); ++i) {
    const EdgeSpec& spec = config.edges[i];
    const std::string label = spec.name.empty() ? "e" + std::to_string(i) : spec.name;
    const VertexId u = lookup(spec.u, "edge " + label);
    const VertexId v = lookup(spec.v, "edge " + label);
    if (u == v) {
      throw Error(ErrorKind::MalformedConfig, "edge " + label + " is a self-loop");
    }
    if (spec.coefficients.empty()) {
      throw Error(ErrorKind::MalformedConfig, "edge " + label + " has no cost coefficients");
    }
    for (double c : spec.coefficients) {
      if (!std::isfinite(c)) {
        throw Error(ErrorKind::MalformedConfig, "edge " + label + " has a non-finite coefficient");
      }
    }
    const NoiseSpec& noise = spec.noise;
    auto bad_width = [](double w) { return !std::isfinite(w) || w < 0.0; };
    if (bad_width(noise.half_width) ||
        std::any_of(noise.per_load.begin(), noise.per_load.end(), bad_width)) {
      throw Error(ErrorKind::MalformedConfig, "edge " + label + " has an invalid noise half-width");
    }
    if (!noise.per_load.empty() && noise.per_load.size() != static_cast<std::size_t>(max_load)) {
      throw Error(ErrorKind::MalformedConfig,
                  "edge " + label + " per-load noise must list exactly K half-widths");
    }

    EdgeCostModel model{spec.coefficients, noise};
    std::vector<double> table(max_load + 1);
    for (int f = 0; f <= max_load; ++f) table[f] = model.evaluate(f);

    for (int f = 0; f < max_load; ++f) {
      if (table[f + 1] < table[f] - detail::cost_tolerance(table[f], table[f + 1])) {
        throw Error(ErrorKind::NonMonotoneCost,
                    "edge " + label + " expected cost decreases between loads " + std::to_string(f) +
                        " and " + std::to_string(f + 1));
      }
    }
    if (table[0] < 0.0) {
      throw Error(ErrorKind::InvalidCostModel, "edge " + label + " has negative expected cost");
    }
    if (!(model.leading() > 0.0)) {
      throw Error(ErrorKind::InvalidCostModel, "edge " + label + " leading coefficient must be positive");
    }
    for (int f = 1; f < max_load; ++f) {
      const double second = table[f + 1] - 2.0 * table[f] + table[f - 1];
      if (second < -detail::cost_tolerance(table[f + 1], table[f - 1]) * 4.0) {
        throw Error(ErrorKind::NonConvexCost,
                    "edge " + label + " expected cost is not convex at load " + std::to_string(f));
      }
    }

    inst.topology_.add_edge(u, v);
    inst.edge_names_.push_back(label);
    inst.models_.push_back(std::move(model));
    inst.cost_table_.push_back(std::move(table));
  }

  for (std::size_t k = 0; k < config.commodities.size(); ++k) {
    const auto& spec = config.commodities[k];
    const std::string label = "commodity " + std::to_string(k);
    const Commodity c{lookup(spec.source, label), lookup(spec.target, label)};
    if (c.source == c.target) {
      throw Error(ErrorKind::DegenerateCommodity,
                  label + " has identical source and destination '" + spec.source + "'");
    }
    if (!inst.topology_.connected(c.source, c.target)) {
      throw Error(ErrorKind::DisconnectedCommodity,
                  label + " (" + spec.source + " -> " + spec.target + ") has no connecting path");
    }
    inst.commodities_.push_back(c);
  }
  inst.seed_ = config.seed;
  return inst;
}

// Per-commodity path assignment with edge loads kept in sync.
class FlowDistribution {
 public:
  FlowDistribution() = default;
  FlowDistribution(std::size_t num_commodities, std::size_t num_edges)
      : paths_(num_commodities), loads_(num_edges, 0) {}
  explicit FlowDistribution(const Instance& inst)
      : FlowDistribution(inst.num_commodities(), inst.num_edges()) {}

  std::size_t num_commodities() const { return paths_.size(); }
  std::size_t num_edges() const { return loads_.size(); }

  const std::optional<Path>& path(CommodityId k) const {
    if (k >= paths_.size()) {
      throw Error(ErrorKind::UnknownCommodity, "unknown commodity " + std::to_string(k));
    }
    return paths_[k];
  }

  bool assigned(CommodityId k) const { return path(k).has_value(); }

  bool fully_assigned() const {
    return std::all_of(paths_.begin(), paths_.end(), [](const auto& p) { return p.has_value(); });
  }

  int load(EdgeId e) const {
    if (e >= loads_.size()) {
      throw Error(ErrorKind::UnknownEdge, "unknown edge id " + std::to_string(e));
    }
    return loads_[e];
  }

  std::span<const int> loads() const { return loads_; }

  // Caller guarantees `p` is a valid path for k (see Instance::validate_path).
  void assign(CommodityId k, Path p) {
    withdraw(k);
    for (EdgeId e : p) ++loads_.at(e);
    paths_[k] = std::move(p);
  }

  void withdraw(CommodityId k) {
    auto& slot = paths_.at(k);
    if (!slot) return;
    for (EdgeId e : *slot) --loads_[e];
    slot.reset();
  }

  bool operator==(const FlowDistribution&) const = default;

 private:
  std::vector<std::optional<Path>> paths_;
  std::vector<int> loads_;
};

inline int edge_load(const FlowDistribution& dist, EdgeId e) { return dist.load(e); }

inline void require_fully_assigned(const FlowDistribution& dist) {
  for (CommodityId k = 0; k < dist.num_commodities(); ++k) {
    if (!dist.assigned(k)) {
      throw Error(ErrorKind::UnassignedCommodity, "commodity " + std::to_string(k) + " is unassigned");
    }
  }
}

// Sum of expected edge costs for an arbitrary (possibly partial) load vector.
inline double expected_cost_of_loads(const Instance& inst, std::span<const int> loads) {
  double total = 0.0;
  for (EdgeId e = 0; e < inst.num_edges(); ++e) total += inst.expected_edge_cost(e, loads[e]);
  return total;
}

inline double expected_total_cost(const Instance& inst, const FlowDistribution& dist) {
  require_fully_assigned(dist);
  return expected_cost_of_loads(inst, dist.loads());
}

// One realization of the slot cost: every edge contributes its expected cost
// plus an independent noise draw at its current load.
template <class Engine>
double sample_slot_cost(const Instance& inst, const FlowDistribution& dist, Engine& rng) {
  require_fully_assigned(dist);
  double total = 0.0;
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const int f = dist.load(e);
    total += inst.expected_edge_cost(e, f) + inst.cost_model(e).noise.sample(f, rng);
  }
  return total;
}

}  // namespace flowsched
