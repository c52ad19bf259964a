#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "flowsched/error.hpp"
#include "flowsched/network_model.hpp"

namespace flowsched {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// One distance advertisement sent over `edge` during `round` (1-based).
struct RouterMessage {
  std::size_t round = 0;
  VertexId sender = 0;
  VertexId receiver = 0;
  EdgeId edge = 0;
  double distance = 0.0;
};

using MessageLog = std::vector<RouterMessage>;

struct RouterState {
  VertexId source = 0;
  std::vector<double> distance;
  std::vector<std::optional<EdgeId>> predecessor;
  std::size_t rounds = 0;
};

struct DistanceVectorOptions {
  std::size_t rounds = 0;  // 0 means |V|
  bool record_trace = false;
};

struct DistanceVectorRun {
  RouterState state;
  MessageLog messages;
  // distance estimates after each round, only when recording
  std::vector<std::vector<double>> history;
};

namespace detail {

inline void check_weights(const Topology& topo, std::span<const double> weights) {
  if (weights.size() != topo.num_edges()) {
    throw Error(ErrorKind::InvalidArgument, "one weight per edge is required");
  }
  for (std::size_t e = 0; e < weights.size(); ++e) {
    if (!(weights[e] >= 0.0)) {
      throw Error(ErrorKind::NegativeWeight,
                  "edge " + std::to_string(e) + " has negative or NaN weight");
    }
  }
}

}  // namespace detail

// Synchronous distance-vector routing. In every round each router that knows
// a finite distance advertises it to its neighbors over each incident edge;
// receivers keep the best offer (smaller edge id, then smaller sender, on
// ties) if it strictly improves their estimate. Always charges the full round
// budget, matching a fixed slot reservation.
inline DistanceVectorRun run_distance_vector(const Topology& topo, std::span<const double> weights,
                                             VertexId source, DistanceVectorOptions options = {}) {
  detail::check_weights(topo, weights);
  if (source >= topo.num_vertices()) {
    throw Error(ErrorKind::InvalidArgument, "unknown source vertex");
  }
  const std::size_t n = topo.num_vertices();
  const std::size_t rounds = options.rounds == 0 ? n : options.rounds;

  DistanceVectorRun run;
  RouterState& st = run.state;
  st.source = source;
  st.distance.assign(n, kInfinity);
  st.predecessor.assign(n, std::nullopt);
  st.distance[source] = 0.0;
  st.rounds = rounds;

  struct Offer {
    double distance = kInfinity;
    EdgeId edge = 0;
    VertexId sender = 0;
  };
  auto better = [](const Offer& a, const Offer& b) {
    return std::tie(a.distance, a.edge, a.sender) < std::tie(b.distance, b.edge, b.sender);
  };

  std::vector<Offer> best(n);
  for (std::size_t round = 1; round <= rounds; ++round) {
    const std::vector<double> advertised = st.distance;
    std::fill(best.begin(), best.end(), Offer{});
    for (VertexId u = 0; u < n; ++u) {
      if (advertised[u] == kInfinity) continue;
      for (EdgeId e : topo.incident(u)) {
        const VertexId v = topo.other_end(e, u);
        if (options.record_trace) run.messages.push_back({round, u, v, e, advertised[u]});
        const Offer offer{advertised[u] + weights[e], e, u};
        if (better(offer, best[v])) best[v] = offer;
      }
    }
    bool changed = false;
    for (VertexId v = 0; v < n; ++v) {
      if (best[v].distance < st.distance[v]) {
        st.distance[v] = best[v].distance;
        st.predecessor[v] = best[v].edge;
        changed = true;
      }
    }
    if (options.record_trace) {
      run.history.push_back(st.distance);
    } else if (!changed) {
      break;  // later rounds cannot change anything
    }
  }
  return run;
}

inline DistanceVectorRun run_distance_vector(const Topology& topo, std::span<const double> weights,
                                             VertexId source, std::size_t rounds) {
  return run_distance_vector(topo, weights, source, DistanceVectorOptions{rounds, false});
}

// Follows predecessor edges back from `dest`; returns the source-to-dest path.
inline Path extract_path(const Topology& topo, const RouterState& state, VertexId dest) {
  if (dest >= state.distance.size() || state.distance[dest] == kInfinity) {
    throw Error(ErrorKind::Unreachable, "destination " + std::to_string(dest) + " is unreachable");
  }
  Path reversed;
  VertexId at = dest;
  while (at != state.source) {
    const auto& pred = state.predecessor[at];
    if (!pred || reversed.size() > topo.num_vertices()) {
      throw Error(ErrorKind::Internal, "broken predecessor chain at vertex " + std::to_string(at));
    }
    reversed.push_back(*pred);
    at = topo.other_end(*pred, at);
  }
  return Path(reversed.rbegin(), reversed.rend());
}

struct ShortestPath {
  double distance = 0.0;
  Path path;
};

// Centralized Dijkstra, the reference the distributed computation is checked
// against.
inline ShortestPath shortest_path_oracle(const Topology& topo, std::span<const double> weights,
                                         VertexId source, VertexId dest) {
  detail::check_weights(topo, weights);
  const std::size_t n = topo.num_vertices();
  if (source >= n || dest >= n) throw Error(ErrorKind::InvalidArgument, "unknown vertex");
  std::vector<double> dist(n, kInfinity);
  std::vector<std::optional<EdgeId>> pred(n);
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.push({0.0, source});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (EdgeId e : topo.incident(u)) {
      const VertexId v = topo.other_end(e, u);
      const double cand = d + weights[e];
      if (cand < dist[v]) {
        dist[v] = cand;
        pred[v] = e;
        queue.push({cand, v});
      }
    }
  }
  if (dist[dest] == kInfinity) {
    throw Error(ErrorKind::Unreachable, "destination " + std::to_string(dest) + " is unreachable");
  }
  Path reversed;
  for (VertexId at = dest; at != source;) {
    reversed.push_back(*pred[at]);
    at = topo.other_end(*pred[at], at);
  }
  return {dist[dest], Path(reversed.rbegin(), reversed.rend())};
}

// Sum of weights along `path`, accumulated from the source end.
inline double path_weight(std::span<const double> weights, const Path& path) {
  double total = 0.0;
  for (EdgeId e : path) total += weights[e];
  return total;
}

}  // namespace flowsched
