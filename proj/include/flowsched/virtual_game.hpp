#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "flowsched/distributed_routing.hpp"
#include "flowsched/error.hpp"
#include "flowsched/network_model.hpp"
#include "flowsched/paths.hpp"
#include "flowsched/pricing.hpp"

namespace flowsched {

// Price differences below this (relative) threshold count as ties.
inline double price_tolerance(double magnitude) {
  return 1e-9 * std::max(1.0, std::abs(magnitude));
}

struct MoveRecord {
  std::size_t circle = 0;
  CommodityId user = 0;
  std::optional<Path> old_path;
  Path new_path;
  double cost_before = 0.0;  // true expected cost, measurement only
  double cost_after = 0.0;
};

struct CircleReport {
  std::size_t circle = 0;
  std::vector<bool> moved;
  // some user that already had a path switched to another one
  bool rerouted = false;
  double cost_after = 0.0;

  bool any_moved() const { return std::find(moved.begin(), moved.end(), true) != moved.end(); }
};

struct GameMessage {
  std::size_t circle = 0;
  CommodityId user = 0;
  RouterMessage message;
};

// Users take turns, in commodity order, withdrawing their flow and having the
// routers compute a minimum-price path to re-insert it. Prices come from the
// view: exact marginal costs, or estimates built from samples.
template <PriceView View>
class VirtualGame {
 public:
  VirtualGame(const Instance& inst, View view)
      : VirtualGame(inst, std::move(view), FlowDistribution(inst)) {}

  VirtualGame(const Instance& inst, View view, FlowDistribution start)
      : inst_(&inst), view_(std::move(view)), dist_(std::move(start)) {
    if (dist_.num_commodities() != inst.num_commodities() || dist_.num_edges() != inst.num_edges()) {
      throw Error(ErrorKind::InvalidArgument, "start distribution does not match the instance");
    }
    for (CommodityId k = 0; k < inst.num_commodities(); ++k) {
      if (dist_.assigned(k)) inst.validate_path(k, *dist_.path(k));
    }
  }

  // Re-routes user k onto a minimum-price path. A user keeps its current path
  // unless the new one is strictly cheaper. Returns whether the path changed
  // (first-time placement counts as a change).
  bool optimize_user(CommodityId k) {
    const Commodity& c = inst_->commodity(k);
    const std::optional<Path> old = dist_.path(k);
    const double cost_before = expected_cost_of_loads(*inst_, dist_.loads());

    // A first-time user has nothing to take out.
    dist_.withdraw(k);

    std::vector<double> weights(inst_->num_edges());
    for (EdgeId e = 0; e < weights.size(); ++e) {
      weights[e] = view_.edge_price(e, dist_.load(e) + 1, 1);
    }
    const auto run = run_distance_vector(inst_->topology(), weights, c.source,
                                         DistanceVectorOptions{inst_->num_vertices(), record_messages_});
    if (record_messages_) {
      for (const auto& m : run.messages) messages_.push_back({circle_ + 1, k, m});
    }
    Path chosen = extract_path(inst_->topology(), run.state, c.target);
    if (old) {
      const double current = path_weight(weights, *old);
      const double best = run.state.distance[c.target];
      if (!(best < current - price_tolerance(current))) chosen = *old;
    }

    const bool moved = !old || *old != chosen;
    dist_.assign(k, chosen);
    slots_charged_ += inst_->num_vertices();
    if (moved) {
      moves_.push_back({circle_ + 1, k, old, std::move(chosen), cost_before,
                        expected_cost_of_loads(*inst_, dist_.loads())});
    }
    return moved;
  }

  CircleReport run_circle() {
    CircleReport report;
    report.circle = circle_ + 1;
    report.moved.resize(inst_->num_commodities());
    for (CommodityId k = 0; k < inst_->num_commodities(); ++k) {
      const bool had_path = dist_.assigned(k);
      report.moved[k] = optimize_user(k);
      report.rerouted = report.rerouted || (had_path && report.moved[k]);
    }
    finish_circle();
    report.cost_after = expected_cost_of_loads(*inst_, dist_.loads());
    return report;
  }

  // Closes the current circle. run_circle() does this itself; callers that
  // drive optimize_user() one slot block at a time call it after user K.
  void finish_circle() { ++circle_; }

  const Instance& instance() const { return *inst_; }
  const View& view() const { return view_; }
  const FlowDistribution& distribution() const { return dist_; }
  std::size_t circles_completed() const { return circle_; }
  std::size_t slots_charged() const { return slots_charged_; }
  const std::vector<MoveRecord>& moves() const { return moves_; }

  void record_messages(bool on) { record_messages_ = on; }
  const std::vector<GameMessage>& messages() const { return messages_; }

 private:
  const Instance* inst_;
  View view_;
  FlowDistribution dist_;
  std::size_t circle_ = 0;
  std::size_t slots_charged_ = 0;
  std::vector<MoveRecord> moves_;
  bool record_messages_ = false;
  std::vector<GameMessage> messages_;
};

struct EquilibriumResult {
  FlowDistribution distribution;
  std::size_t circles_used = 0;       // including the final no-move circle
  std::size_t rerouting_circles = 0;  // circles where an existing path changed
};

inline EquilibriumResult run_to_equilibrium(VirtualGame<ExactPrices>& game,
                                            std::size_t max_circles = 1'000'000) {
  EquilibriumResult result;
  for (;;) {
    if (result.circles_used == max_circles) {
      throw Error(ErrorKind::Internal, "virtual game did not settle within the circle limit");
    }
    const CircleReport report = game.run_circle();
    ++result.circles_used;
    if (report.rerouted) ++result.rerouting_circles;
    if (!report.any_moved()) break;
  }
  result.distribution = game.distribution();
  return result;
}

inline EquilibriumResult run_to_equilibrium(const Instance& inst) {
  VirtualGame<ExactPrices> game(inst, ExactPrices(inst));
  return run_to_equilibrium(game);
}

// No user can lower its own price by switching alone. Exact expectations;
// ties count as equilibrium.
inline bool is_nash(const Instance& inst, const PathCatalog& catalog, const FlowDistribution& dist) {
  require_fully_assigned(dist);
  std::vector<int> others(dist.loads().begin(), dist.loads().end());
  for (CommodityId k = 0; k < inst.num_commodities(); ++k) {
    const Path& own = *dist.path(k);
    for (EdgeId e : own) --others[e];
    auto price_of = [&](const Path& p) {
      double total = 0.0;
      for (EdgeId e : p) {
        total += inst.expected_edge_cost(e, others[e] + 1) - inst.expected_edge_cost(e, others[e]);
      }
      return total;
    };
    const double current = price_of(own);
    bool stable = true;
    for (const Path& alt : catalog.paths(k)) {
      if (price_of(alt) < current - price_tolerance(current)) {
        stable = false;
        break;
      }
    }
    for (EdgeId e : own) ++others[e];
    if (!stable) return false;
  }
  return true;
}

inline bool is_nash(const Instance& inst, const FlowDistribution& dist) {
  return is_nash(inst, PathCatalog(inst), dist);
}

struct CostSpread {
  double max_gap = 0.0;           // largest cost difference between two distributions
  double min_positive_gap = 0.0;  // smallest nonzero one
  std::size_t distributions = 0;
};

inline CostSpread cost_spread(const Instance& inst, const PathCatalog& catalog,
                              std::size_t cap = kDefaultEnumerationCap) {
  std::vector<double> costs;
  costs.reserve(std::min(catalog.distribution_count(), cap));
  for_each_distribution(inst, catalog, cap, [&](auto, std::span<const int> loads) {
    costs.push_back(expected_cost_of_loads(inst, loads));
  });
  std::sort(costs.begin(), costs.end());
  CostSpread spread;
  spread.distributions = costs.size();
  spread.max_gap = costs.back() - costs.front();
  const double tol = price_tolerance(costs.back());
  double min_gap = kInfinity;
  for (std::size_t i = 1; i < costs.size(); ++i) {
    const double gap = costs[i] - costs[i - 1];
    if (gap > tol) min_gap = std::min(min_gap, gap);
  }
  if (spread.max_gap <= tol || min_gap == kInfinity) {
    throw Error(ErrorKind::DegenerateInstance, "all flow distributions have the same expected cost");
  }
  spread.min_positive_gap = min_gap;
  return spread;
}

// ceil(max cost gap / min positive cost gap): the number of circles in which
// some user can still switch paths before the game settles.
inline std::size_t convergence_bound(const Instance& inst, std::size_t cap = kDefaultEnumerationCap) {
  const PathCatalog catalog(inst);
  const CostSpread spread = cost_spread(inst, catalog, cap);
  return static_cast<std::size_t>(std::ceil(spread.max_gap / spread.min_positive_gap - 1e-9));
}

}  // namespace flowsched
