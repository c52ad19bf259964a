#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "flowsched/error.hpp"
#include "flowsched/network_model.hpp"

namespace flowsched {

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;
inline constexpr std::size_t kDefaultPathCap = 100'000;

// All simple paths from s to t, in depth-first order over incident edge ids.
inline std::vector<Path> enumerate_simple_paths(const Topology& topo, VertexId s, VertexId t,
                                                std::size_t cap = kDefaultPathCap) {
  std::vector<Path> out;
  std::vector<bool> on_path(topo.num_vertices(), false);
  Path current;

  auto dfs = [&](auto&& self, VertexId at) -> void {
    if (at == t) {
      if (out.size() == cap) {
        throw Error(ErrorKind::EnumerationCapExceeded,
                    "more than " + std::to_string(cap) + " simple paths");
      }
      out.push_back(current);
      return;
    }
    on_path[at] = true;
    for (EdgeId e : topo.incident(at)) {
      const VertexId next = topo.other_end(e, at);
      if (on_path[next]) continue;
      current.push_back(e);
      self(self, next);
      current.pop_back();
    }
    on_path[at] = false;
  };
  dfs(dfs, s);
  return out;
}

// Simple-path sets of every commodity.
class PathCatalog {
 public:
  explicit PathCatalog(const Instance& inst, std::size_t per_commodity_cap = kDefaultPathCap) {
    paths_.reserve(inst.num_commodities());
    for (CommodityId k = 0; k < inst.num_commodities(); ++k) {
      const Commodity& c = inst.commodity(k);
      paths_.push_back(enumerate_simple_paths(inst.topology(), c.source, c.target, per_commodity_cap));
    }
  }

  std::size_t num_commodities() const { return paths_.size(); }
  const std::vector<Path>& paths(CommodityId k) const { return paths_.at(k); }

  // Number of fully assigned distributions, saturating at SIZE_MAX.
  std::size_t distribution_count() const {
    std::size_t total = 1;
    for (const auto& p : paths_) {
      if (p.empty()) return 0;
      if (total > std::numeric_limits<std::size_t>::max() / p.size()) {
        return std::numeric_limits<std::size_t>::max();
      }
      total *= p.size();
    }
    return total;
  }

  void require_within(std::size_t cap) const {
    const std::size_t n = distribution_count();
    if (n > cap) {
      throw Error(ErrorKind::EnumerationCapExceeded,
                  std::to_string(n) + " flow distributions exceed the enumeration cap of " +
                      std::to_string(cap));
    }
  }

 private:
  std::vector<std::vector<Path>> paths_;
};

// Visits every fully assigned distribution in odometer order (commodity 0
// varies fastest). `fn(choice, loads)` gets the per-commodity path indices
// and the matching edge loads.
template <class Fn>
void for_each_distribution(const Instance& inst, const PathCatalog& catalog, std::size_t cap,
                           Fn&& fn) {
  catalog.require_within(cap);
  const std::size_t K = catalog.num_commodities();
  std::vector<std::size_t> choice(K, 0);
  std::vector<int> loads(inst.num_edges(), 0);
  for (CommodityId k = 0; k < K; ++k) {
    for (EdgeId e : catalog.paths(k)[0]) ++loads[e];
  }
  for (;;) {
    fn(std::span<const std::size_t>(choice), std::span<const int>(loads));
    std::size_t k = 0;
    for (; k < K; ++k) {
      const auto& options = catalog.paths(k);
      for (EdgeId e : options[choice[k]]) --loads[e];
      choice[k] = (choice[k] + 1) % options.size();
      for (EdgeId e : options[choice[k]]) ++loads[e];
      if (choice[k] != 0) break;
    }
    if (k == K) return;
  }
}

inline FlowDistribution materialize(const Instance& inst, const PathCatalog& catalog,
                                    std::span<const std::size_t> choice) {
  FlowDistribution dist(inst);
  for (CommodityId k = 0; k < choice.size(); ++k) dist.assign(k, catalog.paths(k).at(choice[k]));
  return dist;
}

}  // namespace flowsched
