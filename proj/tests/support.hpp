#pragma once

// Shared fixtures and independent reference computations for the test suite.
// The reference versions deliberately avoid the library's incremental
// shortcuts: they recount loads, evaluate polynomials term by term and
// compare whole distributions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "flowsched/flowsched.hpp"

namespace flowsched::testing {

inline ScenarioConfig d1_config(NoiseSpec noise = {}) {
  ScenarioConfig cfg;
  cfg.vertices = {"u", "v"};
  cfg.edges = {{"e1", "u", "v", {1, 0, 0}, noise}, {"e2", "u", "v", {1, 0, 0}, noise}};
  cfg.commodities = {{"u", "v"}, {"u", "v"}};
  cfg.seed = 1;
  return cfg;
}

inline Instance d1(NoiseSpec noise = {}) { return build_instance(d1_config(noise)); }

// u - x - v with unit-slope linear costs, one commodity u -> v.
inline Instance line_graph() {
  ScenarioConfig cfg;
  cfg.vertices = {"u", "x", "v"};
  cfg.edges = {{"ux", "u", "x", {1, 0}, {}}, {"xv", "x", "v", {1, 0}, {}}};
  cfg.commodities = {{"u", "v"}};
  return build_instance(cfg);
}

inline FlowDistribution with_paths(const Instance& inst, const std::vector<Path>& paths) {
  FlowDistribution dist(inst);
  for (CommodityId k = 0; k < paths.size(); ++k) dist.assign(k, paths[k]);
  return dist;
}

// Random instances within the desk limits used throughout the suite.
inline InstanceSampling desk_law(int degree_max = 3) {
  InstanceSampling law;
  law.vertices_min = 3;
  law.vertices_max = 8;
  law.extra_edges_min = 0;
  law.extra_edges_max = 4;
  law.commodities_min = 1;
  law.commodities_max = 3;
  law.degree_min = 1;
  law.degree_max = degree_max;
  law.leading_min = 0.25;
  law.leading_max = 4.0;
  return law;
}

inline Instance random_instance(std::uint64_t seed, const InstanceSampling& law = desk_law()) {
  Rng rng = make_stream(seed, "test-instance");
  return build_instance(sample_scenario(law, rng));
}

// --- reference computations -------------------------------------------------

inline double naive_polynomial(const std::vector<double>& coefficients, int load) {
  double total = 0.0;
  const int d = static_cast<int>(coefficients.size()) - 1;
  for (int i = 0; i <= d; ++i) total += coefficients[i] * std::pow(static_cast<double>(load), d - i);
  return total;
}

inline int naive_load(const FlowDistribution& dist, EdgeId e) {
  int count = 0;
  for (CommodityId k = 0; k < dist.num_commodities(); ++k) {
    if (!dist.path(k)) continue;
    for (EdgeId x : *dist.path(k)) count += x == e ? 1 : 0;
  }
  return count;
}

inline double naive_total_cost(const Instance& inst, const FlowDistribution& dist) {
  double total = 0.0;
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    total += naive_polynomial(inst.cost_model(e).coefficients, naive_load(dist, e));
  }
  return total;
}

// Price user k would pay on `path` given everyone else's current paths:
// cost with k on `path` minus cost without k.
inline double naive_deviation_price(const Instance& inst, const FlowDistribution& dist, CommodityId k,
                                    const Path& path) {
  FlowDistribution with = dist;
  with.assign(k, path);
  FlowDistribution without = dist;
  without.withdraw(k);
  return naive_total_cost(inst, with) - naive_total_cost(inst, without);
}

inline bool naive_is_nash(const Instance& inst, const FlowDistribution& dist) {
  for (CommodityId k = 0; k < inst.num_commodities(); ++k) {
    const double current = naive_deviation_price(inst, dist, k, *dist.path(k));
    const auto& c = inst.commodity(k);
    for (const Path& alt : enumerate_simple_paths(inst.topology(), c.source, c.target)) {
      const double price = naive_deviation_price(inst, dist, k, alt);
      if (price < current - 1e-9 * std::max(1.0, std::abs(current))) return false;
    }
  }
  return true;
}

// All fully assigned distributions' expected costs, by nested recursion.
inline std::vector<double> all_distribution_costs(const Instance& inst) {
  std::vector<std::vector<Path>> options;
  for (CommodityId k = 0; k < inst.num_commodities(); ++k) {
    const auto& c = inst.commodity(k);
    options.push_back(enumerate_simple_paths(inst.topology(), c.source, c.target));
  }
  std::vector<double> costs;
  FlowDistribution dist(inst);
  auto recurse = [&](auto&& self, CommodityId k) -> void {
    if (k == options.size()) {
      costs.push_back(naive_total_cost(inst, dist));
      return;
    }
    for (const Path& p : options[k]) {
      dist.assign(k, p);
      self(self, k + 1);
    }
    dist.withdraw(k);
  };
  recurse(recurse, 0);
  return costs;
}

// ceil(max pairwise gap / min positive pairwise gap) by all-pairs comparison.
inline std::size_t naive_convergence_bound(const Instance& inst) {
  const auto costs = all_distribution_costs(inst);
  double max_gap = 0.0;
  double min_gap = std::numeric_limits<double>::infinity();
  const double tol = 1e-9 * std::max(1.0, *std::max_element(costs.begin(), costs.end()));
  for (std::size_t i = 0; i < costs.size(); ++i) {
    for (std::size_t j = 0; j < costs.size(); ++j) {
      const double gap = std::abs(costs[i] - costs[j]);
      max_gap = std::max(max_gap, gap);
      if (gap > tol) min_gap = std::min(min_gap, gap);
    }
  }
  return static_cast<std::size_t>(std::ceil(max_gap / min_gap - 1e-9));
}

// All-pairs shortest distances by Floyd-Warshall over the edge list.
inline std::vector<std::vector<double>> floyd_warshall(const Topology& topo, const std::vector<double>& w) {
  const std::size_t n = topo.num_vertices();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
  for (std::size_t v = 0; v < n; ++v) d[v][v] = 0.0;
  for (EdgeId e = 0; e < topo.num_edges(); ++e) {
    const auto& ed = topo.edge(e);
    d[ed.u][ed.v] = std::min(d[ed.u][ed.v], w[e]);
    d[ed.v][ed.u] = std::min(d[ed.v][ed.u], w[e]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    }
  }
  return d;
}

// Random connected multigraph with integer-valued or real weights.
struct WeightedGraph {
  Topology topo;
  std::vector<double> weights;
};

inline WeightedGraph random_weighted_graph(Rng& rng, std::size_t max_vertices, bool integer_weights) {
  const auto n = std::uniform_int_distribution<std::size_t>(1, max_vertices)(rng);
  WeightedGraph g{Topology(n), {}};
  for (std::size_t v = 1; v < n; ++v) {
    g.topo.add_edge(std::uniform_int_distribution<std::size_t>(0, v - 1)(rng), v);
  }
  const auto extra = n < 2 ? 0 : std::uniform_int_distribution<std::size_t>(0, 2 * n)(rng);
  for (std::size_t i = 0; i < extra; ++i) {
    const auto a = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    auto b = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
    if (b >= a) ++b;
    g.topo.add_edge(a, b);
  }
  for (EdgeId e = 0; e < g.topo.num_edges(); ++e) {
    g.weights.push_back(integer_weights ? std::uniform_int_distribution<int>(0, 9)(rng)
                                        : std::uniform_real_distribution<double>(0.0, 10.0)(rng));
  }
  return g;
}

}  // namespace flowsched::testing
