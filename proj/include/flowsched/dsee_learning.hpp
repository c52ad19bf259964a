#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "flowsched/error.hpp"
#include "flowsched/network_model.hpp"
#include "flowsched/paths.hpp"
#include "flowsched/pricing.hpp"
#include "flowsched/random.hpp"
#include "flowsched/virtual_game.hpp"

namespace flowsched {

// ---------------------------------------------------------------------------
// Sample store

// Per (edge, load 1..K) observation count and running mean, plus the number
// of exploration slots consumed so far. Load 0 always reads the known
// constant term of the cost polynomial.
class SampleStore {
 public:
  explicit SampleStore(const Instance& inst)
      : edges_(inst.num_edges()),
        max_load_(inst.max_load()),
        counts_(edges_ * max_load_, 0),
        means_(edges_ * max_load_, 0.0) {
    constants_.reserve(edges_);
    for (EdgeId e = 0; e < edges_; ++e) constants_.push_back(inst.expected_edge_cost(e, 0));
  }

  void observe(EdgeId e, int load, double value) {
    const std::size_t i = index(e, load);
    ++counts_[i];
    means_[i] += (value - means_[i]) / static_cast<double>(counts_[i]);
  }

  void add_explored_slots(std::size_t n) { card_ += n; }

  std::size_t count(EdgeId e, int load) const { return counts_[index(e, load)]; }

  // Unobserved levels read 0 (optimistic start).
  double mean(EdgeId e, int load) const {
    if (load == 0) {
      if (e >= edges_) throw Error(ErrorKind::UnknownEdge, "unknown edge id " + std::to_string(e));
      return constants_[e];
    }
    return means_[index(e, load)];
  }

  std::size_t card() const { return card_; }
  std::size_t num_edges() const { return edges_; }
  int max_load() const { return max_load_; }

  bool all_observed() const {
    return std::none_of(counts_.begin(), counts_.end(), [](std::size_t c) { return c == 0; });
  }

  std::size_t total_observations() const {
    std::size_t n = 0;
    for (auto c : counts_) n += c;
    return n;
  }

 private:
  std::size_t index(EdgeId e, int load) const {
    if (e >= edges_) throw Error(ErrorKind::UnknownEdge, "unknown edge id " + std::to_string(e));
    if (load < 1 || load > max_load_) {
      throw Error(ErrorKind::LoadOutOfRange, "load " + std::to_string(load) + " outside 1.." +
                                                 std::to_string(max_load_));
    }
    return e * max_load_ + (load - 1);
  }

  std::size_t edges_;
  int max_load_;
  std::vector<std::size_t> counts_;
  std::vector<double> means_;
  std::vector<double> constants_;
  std::size_t card_ = 0;
};

// Marginal price from sample means, clamped at zero so routing weights stay
// nonnegative.
inline double estimated_edge_price(const SampleStore& store, EdgeId e, int load, int withdrawn = 1) {
  if (load - withdrawn < 0 || withdrawn < 0) {
    throw Error(ErrorKind::LoadOutOfRange, "price query below zero load");
  }
  return std::max(0.0, store.mean(e, load) - store.mean(e, load - withdrawn));
}

class EstimatedPrices {
 public:
  static constexpr PriceSource source = PriceSource::Estimated;

  explicit EstimatedPrices(const SampleStore& store) : store_(&store) {}

  double edge_price(EdgeId e, int load, int withdrawn = 1) const {
    return estimated_edge_price(*store_, e, load, withdrawn);
  }

 private:
  const SampleStore* store_;
};

// ---------------------------------------------------------------------------
// Schedule

enum class SlotKind : std::uint8_t { Explore, BellmanFord, Exploit };

inline const char* to_string(SlotKind kind) {
  switch (kind) {
    case SlotKind::Explore: return "explore";
    case SlotKind::BellmanFord: return "bellman_ford";
    case SlotKind::Exploit: return "exploit";
  }
  return "?";
}

struct SlotLabel {
  SlotKind kind = SlotKind::Explore;
  // explore: exploring commodity; bellman_ford: position 0..NK-1 in the block
  std::uint32_t detail = 0;
};

// Deterministic interleaving of exploration and exploitation. Slots are
// numbered from 1. An exploration period is N slots; an exploitation period
// is an N*K-slot Bellman-Ford block followed by exploit slots, and ends at the
// first slot t with card(t) < G ln t, where card(t) counts exploration slots
// before t. The same test decides whether another exploration period follows
// an exploration period. Slot 1 always explores.
class DseeSchedule {
 public:
  double g() const { return g_; }
  std::size_t vertices() const { return n_; }
  std::size_t commodities() const { return k_; }
  std::size_t horizon() const { return labels_.size(); }

  const SlotLabel& label(std::size_t t) const { return labels_.at(t - 1); }
  const std::vector<SlotLabel>& labels() const { return labels_; }

  // first slot of each exploration period, increasing
  const std::vector<std::size_t>& exploration_starts() const { return explore_starts_; }
  // first slot of each Bellman-Ford block, increasing
  const std::vector<std::size_t>& exploitation_starts() const { return exploit_starts_; }

  std::size_t count(SlotKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(labels_.begin(), labels_.end(), [&](const SlotLabel& l) { return l.kind == kind; }));
  }

 private:
  friend DseeSchedule build_schedule(double g, std::size_t n, std::size_t k, std::size_t horizon);

  double g_ = 0.0;
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<SlotLabel> labels_;
  std::vector<std::size_t> explore_starts_;
  std::vector<std::size_t> exploit_starts_;
};

inline DseeSchedule build_schedule(double g, std::size_t n, std::size_t k, std::size_t horizon) {
  if (!(g > 0.0) || !std::isfinite(g)) throw Error(ErrorKind::InvalidArgument, "G must be positive");
  if (n == 0 || k == 0) throw Error(ErrorKind::InvalidArgument, "N and K must be positive");
  if (horizon < n * (k + 1)) {
    throw Error(ErrorKind::InvalidArgument,
                "horizon " + std::to_string(horizon) + " is shorter than N*(K+1) = " +
                    std::to_string(n * (k + 1)));
  }
  DseeSchedule s;
  s.g_ = g;
  s.n_ = n;
  s.k_ = k;
  s.labels_.reserve(horizon);
  auto below_target = [&](std::size_t t, std::size_t card) {
    return static_cast<double>(card) < g * std::log(static_cast<double>(t));
  };

  std::size_t card = 0;
  std::size_t periods = 0;
  std::size_t t = 1;
  while (t <= horizon) {
    if (t == 1 || below_target(t, card)) {
      s.explore_starts_.push_back(t);
      const auto source = static_cast<std::uint32_t>(periods++ % k);
      for (std::size_t i = 0; i < n && t <= horizon; ++i, ++t, ++card) {
        s.labels_.push_back({SlotKind::Explore, source});
      }
      continue;
    }
    s.exploit_starts_.push_back(t);
    for (std::size_t i = 0; i < n * k && t <= horizon; ++i, ++t) {
      s.labels_.push_back({SlotKind::BellmanFord, static_cast<std::uint32_t>(i)});
    }
    while (t <= horizon && !below_target(t, card)) {
      s.labels_.push_back({SlotKind::Exploit, 0});
      ++t;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Exploration

// One relay hop: the router at `at` probes a uniformly random incident edge
// at a uniformly random load level in 1..K, records the sampled cost, and
// forwards to the edge's other end.
template <class Engine>
void exploration_hop(const Instance& inst, SampleStore& store, VertexId& at, Engine& walk_rng,
                     Engine& noise_rng) {
  const auto incident = inst.topology().incident(at);
  if (incident.empty()) {
    throw Error(ErrorKind::Internal, "exploration reached isolated vertex " + inst.vertex_name(at));
  }
  const EdgeId e = incident[std::uniform_int_distribution<std::size_t>(0, incident.size() - 1)(walk_rng)];
  const int load = std::uniform_int_distribution<int>(1, inst.max_load())(walk_rng);
  const double sample = inst.expected_edge_cost(e, load) + inst.cost_model(e).noise.sample(load, noise_rng);
  store.observe(e, load, sample);
  store.add_explored_slots(1);
  at = inst.topology().other_end(e, at);
}

// A full N-hop exploration period started by commodity k's source.
template <class Engine>
void exploration_period(const Instance& inst, CommodityId k, SampleStore& store, Engine& rng) {
  VertexId at = inst.commodity(k).source;
  for (std::size_t i = 0; i < inst.num_vertices(); ++i) exploration_hop(inst, store, at, rng, rng);
}

// ---------------------------------------------------------------------------
// Unknown-model run

struct SlotRecord {
  std::size_t t = 0;
  SlotKind kind = SlotKind::Explore;
  // explore: exploring commodity; otherwise the current game circle
  std::size_t source_or_circle = 0;
  bool at_nash = false;  // true expectations, never visible to routers
  double realized_cost = 0.0;  // exploit slots only
  double expected_cost = std::numeric_limits<double>::quiet_NaN();  // NaN until all users placed
  std::size_t card = 0;  // exploration slots up to and including t
};

struct UnknownRunOptions {
  std::size_t path_cap = kDefaultPathCap;
};

struct UnknownRunResult {
  std::vector<SlotRecord> trace;
  FlowDistribution final_distribution;
  std::vector<MoveRecord> moves;
  std::size_t circles = 0;
  // first circle whose Bellman-Ford block began with every (edge, load)
  // observed; 0 if none did
  std::size_t first_informed_circle = 0;
  std::optional<SampleStore> store;
};

// Executes the schedule slot by slot. Exploration slots relay probes,
// Bellman-Ford blocks advance one game circle on estimated prices (user k
// re-routes at the first slot of its N-slot share), and exploit slots carry
// the current distribution and sample its cost.
inline UnknownRunResult run_unknown(const Instance& inst, double g, std::size_t horizon,
                                    std::uint64_t seed, UnknownRunOptions options = {}) {
  const std::size_t N = inst.num_vertices();
  const std::size_t K = inst.num_commodities();
  const DseeSchedule schedule = build_schedule(g, N, K, horizon);
  const PathCatalog catalog(inst, options.path_cap);

  Rng walk_rng = make_stream(seed, "exploration-walk");
  Rng probe_rng = make_stream(seed, "probe-noise");
  Rng slot_rng = make_stream(seed, "slot-noise");

  UnknownRunResult result;
  SampleStore store(inst);
  VirtualGame<EstimatedPrices> game(inst, EstimatedPrices(store));
  result.trace.reserve(horizon);

  bool at_nash = false;
  double expected = std::numeric_limits<double>::quiet_NaN();
  VertexId walker = 0;
  std::size_t hops_left = 0;
  std::size_t circle = 0;

  for (std::size_t t = 1; t <= horizon; ++t) {
    const SlotLabel& label = schedule.label(t);
    SlotRecord rec;
    rec.t = t;
    rec.kind = label.kind;
    switch (label.kind) {
      case SlotKind::Explore:
        if (hops_left == 0) {
          walker = inst.commodity(label.detail).source;
          hops_left = N;
        }
        exploration_hop(inst, store, walker, walk_rng, probe_rng);
        --hops_left;
        rec.source_or_circle = label.detail;
        break;
      case SlotKind::BellmanFord: {
        if (label.detail == 0) {
          ++circle;
          if (result.first_informed_circle == 0 && store.all_observed()) {
            result.first_informed_circle = circle;
          }
        }
        if (label.detail % N == 0) {
          const CommodityId user = label.detail / N;
          const bool moved = game.optimize_user(user);
          const auto& dist = game.distribution();
          if (dist.fully_assigned() && (moved || std::isnan(expected))) {
            at_nash = is_nash(inst, catalog, dist);
            expected = expected_total_cost(inst, dist);
          }
          if (user + 1 == K) game.finish_circle();
        }
        rec.source_or_circle = circle;
        break;
      }
      case SlotKind::Exploit:
        rec.realized_cost = sample_slot_cost(inst, game.distribution(), slot_rng);
        rec.source_or_circle = circle;
        break;
    }
    rec.at_nash = at_nash;
    rec.expected_cost = expected;
    rec.card = store.card();
    result.trace.push_back(rec);
  }
  result.final_distribution = game.distribution();
  result.moves = game.moves();
  result.circles = circle;
  result.store = store;
  return result;
}

// ---------------------------------------------------------------------------
// Sufficient-G parameters

struct GBoundParams {
  int d = 0;            // max rank of a commodity's path-incidence vectors
  double sigma2 = 0.0;  // largest edge-cost variance
  double r = 0.0;       // min per-(edge, load) probability of being probed in one period
  double r_low = 0.0;   // 95% interval of the Monte Carlo estimate
  double r_high = 0.0;
  double c = 0.0;       // smallest positive best/second-best path price gap
};

struct GBound {
  GBoundParams params;
  double g_star = 0.0;
};

struct GBoundOptions {
  std::size_t monte_carlo_periods = 20'000;
  std::uint64_t seed = 0;
  std::size_t enumeration_cap = kDefaultEnumerationCap;
};

// Rank of the 0/1 edge-incidence vectors of `paths`.
inline int incidence_rank(const std::vector<Path>& paths, std::size_t num_edges) {
  std::vector<std::vector<double>> rows;
  for (const Path& p : paths) {
    std::vector<double> row(num_edges, 0.0);
    for (EdgeId e : p) row[e] = 1.0;
    rows.push_back(std::move(row));
  }
  int rank = 0;
  for (std::size_t col = 0; col < num_edges && rank < static_cast<int>(rows.size()); ++col) {
    std::size_t pivot = rank;
    for (std::size_t r = rank; r < rows.size(); ++r) {
      if (std::abs(rows[r][col]) > std::abs(rows[pivot][col])) pivot = r;
    }
    if (std::abs(rows[pivot][col]) < 1e-9) continue;
    std::swap(rows[pivot], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == static_cast<std::size_t>(rank)) continue;
      const double factor = rows[r][col] / rows[rank][col];
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < num_edges; ++c) rows[r][c] -= factor * rows[rank][c];
    }
    ++rank;
  }
  return rank;
}

// Smallest positive gap, over commodities and all fully assigned
// distributions of the others, between the cheapest and the next cheaper
// distinct path price.
inline double min_price_gap(const Instance& inst, const PathCatalog& catalog, std::size_t cap) {
  double gap = kInfinity;
  std::vector<int> others(inst.num_edges());
  std::vector<double> prices;
  for_each_distribution(inst, catalog, cap, [&](std::span<const std::size_t> choice,
                                                std::span<const int> loads) {
    for (CommodityId k = 0; k < inst.num_commodities(); ++k) {
      const auto& options = catalog.paths(k);
      if (options.size() < 2) continue;
      std::copy(loads.begin(), loads.end(), others.begin());
      for (EdgeId e : options[choice[k]]) --others[e];
      prices.clear();
      for (const Path& p : options) {
        double price = 0.0;
        for (EdgeId e : p) {
          price += inst.expected_edge_cost(e, others[e] + 1) - inst.expected_edge_cost(e, others[e]);
        }
        prices.push_back(price);
      }
      std::sort(prices.begin(), prices.end());
      for (std::size_t i = 1; i < prices.size(); ++i) {
        const double d = prices[i] - prices[0];
        if (d > price_tolerance(prices[i])) {
          gap = std::min(gap, d);
          break;
        }
      }
    }
  });
  if (gap == kInfinity) {
    throw Error(ErrorKind::DegenerateInstance, "every commodity's paths always tie in price");
  }
  return gap;
}

inline GBound compute_g_bound(const Instance& inst, GBoundOptions options = {}) {
  GBound out;
  GBoundParams& p = out.params;
  const PathCatalog catalog(inst);
  for (CommodityId k = 0; k < inst.num_commodities(); ++k) {
    p.d = std::max(p.d, incidence_rank(catalog.paths(k), inst.num_edges()));
  }
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    for (int f = 0; f <= inst.max_load(); ++f) {
      p.sigma2 = std::max(p.sigma2, inst.cost_model(e).noise.variance_at(f));
    }
  }
  p.c = min_price_gap(inst, catalog, options.enumeration_cap);

  // Monte Carlo over exploration periods, sources in round-robin order.
  const std::size_t periods = options.monte_carlo_periods;
  if (periods == 0) throw Error(ErrorKind::InvalidArgument, "need at least one Monte Carlo period");
  const int K = inst.max_load();
  std::vector<std::size_t> hits(inst.num_edges() * K, 0);
  std::vector<std::size_t> seen_in_period(inst.num_edges() * K, 0);
  Rng rng = make_stream(options.seed, "probe-probability");
  for (std::size_t period = 1; period <= periods; ++period) {
    VertexId at = inst.commodity((period - 1) % inst.num_commodities()).source;
    for (std::size_t hop = 0; hop < inst.num_vertices(); ++hop) {
      const auto incident = inst.topology().incident(at);
      const EdgeId e = incident[std::uniform_int_distribution<std::size_t>(0, incident.size() - 1)(rng)];
      const int load = std::uniform_int_distribution<int>(1, K)(rng);
      const std::size_t i = e * K + (load - 1);
      if (seen_in_period[i] != period) {
        seen_in_period[i] = period;
        ++hits[i];
      }
      at = inst.topology().other_end(e, at);
    }
  }
  const std::size_t min_hits = *std::min_element(hits.begin(), hits.end());
  if (min_hits == 0) {
    throw Error(ErrorKind::Unreachable, "some (edge, load) pair is never probed by exploration");
  }
  const double m = static_cast<double>(periods);
  p.r = static_cast<double>(min_hits) / m;
  const double half = 1.96 * std::sqrt(p.r * (1.0 - p.r) / m);
  p.r_low = std::max(0.0, p.r - half);
  p.r_high = std::min(1.0, p.r + half);

  const double edges = static_cast<double>(inst.num_edges());
  out.g_star = std::max(3.0 / p.r, 8.0 * p.d * p.d * edges * p.sigma2 / (p.r * p.c * p.c));
  return out;
}

}  // namespace flowsched
