#pragma once

#include <concepts>
#include <string>

#include "flowsched/error.hpp"
#include "flowsched/network_model.hpp"

namespace flowsched {

enum class PriceSource { Exact, Estimated };

// A price view answers "what does edge e charge a user whose arrival brings
// its load to `load`", with `withdrawn` units of that user's own flow.
template <class V>
concept PriceView = requires(const V& view, EdgeId e, int load) {
  { view.edge_price(e, load, load) } -> std::convertible_to<double>;
  { V::source } -> std::convertible_to<PriceSource>;
};

// Marginal prices from the true expected costs.
class ExactPrices {
 public:
  static constexpr PriceSource source = PriceSource::Exact;

  explicit ExactPrices(const Instance& inst) : inst_(&inst) {}

  double edge_price(EdgeId e, int load, int withdrawn = 1) const {
    if (load - withdrawn < 0 || load > inst_->max_load() || withdrawn < 0) {
      throw Error(ErrorKind::LoadOutOfRange,
                  "price query at load " + std::to_string(load) + " withdrawing " +
                      std::to_string(withdrawn) + " is outside 0.." +
                      std::to_string(inst_->max_load()));
    }
    return inst_->expected_edge_cost(e, load) - inst_->expected_edge_cost(e, load - withdrawn);
  }

  const Instance& instance() const { return *inst_; }

 private:
  const Instance* inst_;
};

template <PriceView View>
double edge_price(const View& view, EdgeId e, int load, int withdrawn = 1) {
  return view.edge_price(e, load, withdrawn);
}

// Price charged to user k for `path`, where `dist` already carries k on it.
inline double path_price(const Instance& inst, const FlowDistribution& dist, CommodityId k,
                         const Path& path) {
  inst.validate_path(k, path);
  const ExactPrices prices(inst);
  double total = 0.0;
  for (EdgeId e : path) total += prices.edge_price(e, dist.load(e), 1);
  return total;
}

// Drop in expected network cost if user k left: C(F) - C(F without k).
inline double user_revenue(const Instance& inst, const FlowDistribution& dist, CommodityId k) {
  if (!dist.assigned(k)) {
    throw Error(ErrorKind::UnassignedCommodity, "commodity " + std::to_string(k) + " is unassigned");
  }
  FlowDistribution without = dist;
  without.withdraw(k);
  return expected_cost_of_loads(inst, dist.loads()) - expected_cost_of_loads(inst, without.loads());
}

inline double total_price_of_loads(const Instance& inst, std::span<const int> loads) {
  double total = 0.0;
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const int f = loads[e];
    if (f > 0) total += (inst.expected_edge_cost(e, f) - inst.expected_edge_cost(e, f - 1)) * f;
  }
  return total;
}

// Sum over edges of marginal price times load; equals the sum of all user
// revenues.
inline double total_price(const Instance& inst, const FlowDistribution& dist) {
  require_fully_assigned(dist);
  return total_price_of_loads(inst, dist.loads());
}

}  // namespace flowsched
