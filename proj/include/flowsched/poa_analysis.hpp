#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowsched/error.hpp"
#include "flowsched/network_model.hpp"
#include "flowsched/paths.hpp"
#include "flowsched/pricing.hpp"
#include "flowsched/virtual_game.hpp"

namespace flowsched {

struct OptimumResult {
  FlowDistribution distribution;
  double cost = 0.0;
};

// Social optimum by exhaustive enumeration of all path combinations.
inline OptimumResult brute_force_optimum(const Instance& inst, const PathCatalog& catalog,
                                         std::size_t cap = kDefaultEnumerationCap) {
  double best = kInfinity;
  std::vector<std::size_t> best_choice;
  for_each_distribution(inst, catalog, cap, [&](std::span<const std::size_t> choice,
                                                std::span<const int> loads) {
    const double cost = expected_cost_of_loads(inst, loads);
    if (cost < best) {
      best = cost;
      best_choice.assign(choice.begin(), choice.end());
    }
  });
  return {materialize(inst, catalog, best_choice), best};
}

inline OptimumResult brute_force_optimum(const Instance& inst,
                                         std::size_t cap = kDefaultEnumerationCap) {
  return brute_force_optimum(inst, PathCatalog(inst), cap);
}

inline double price_of_anarchy(const Instance& inst, const FlowDistribution& equilibrium,
                               std::size_t cap = kDefaultEnumerationCap) {
  const PathCatalog catalog(inst);
  if (!is_nash(inst, catalog, equilibrium)) {
    throw Error(ErrorKind::InvalidArgument, "distribution is not a Nash equilibrium");
  }
  const OptimumResult opt = brute_force_optimum(inst, catalog, cap);
  if (opt.cost <= 0.0) {
    throw Error(ErrorKind::DegenerateInstance, "optimum expected cost is zero");
  }
  return expected_total_cost(inst, equilibrium) / opt.cost;
}

// Closed-form ceiling on the price of anarchy for cost polynomials with
// nonnegative coefficients: [(d+1) * L * max_e 1/s_e]^d, where d is the
// largest degree, L the largest unit-load cost increase c_e(1) - c_e(0), and
// s_e the smallest positive coefficient of edge e.
inline double polynomial_anarchy_bound(const Instance& inst) {
  double max_inverse_s = 0.0;
  double unit_increase = 0.0;
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const auto& coefficients = inst.cost_model(e).coefficients;
    double smallest = kInfinity;
    for (double a : coefficients) {
      if (a < 0.0) {
        throw Error(ErrorKind::NegativeCoefficient,
                    "edge " + inst.edge_name(e) + " has a negative coefficient");
      }
      if (a > 0.0) smallest = std::min(smallest, a);
    }
    if (smallest == kInfinity) {
      throw Error(ErrorKind::DegenerateInstance, "edge " + inst.edge_name(e) + " has all-zero coefficients");
    }
    max_inverse_s = std::max(max_inverse_s, 1.0 / smallest);
    const auto& model = inst.cost_model(e);
    unit_increase = std::max(unit_increase, model.evaluate(1.0) - model.evaluate(0.0));
  }
  const int d = inst.max_degree();
  return std::pow((d + 1) * unit_increase * max_inverse_s, d);
}

// Empirical counterparts of the constants used to bound the price of
// anarchy, computed over every fully assigned distribution.
struct AnarchyDiagnostics {
  // min / max of total price over expected cost (distributions with positive cost)
  double price_cost_ratio_min = kInfinity;
  double price_cost_ratio_max = 0.0;
  // min over distributions of P(F) - C(F); nonnegative for convex costs with c(0) = 0
  double cost_price_margin_min = kInfinity;
  // max over edges and loads 1..K-1 of the ratio of consecutive cost increments
  double marginal_growth_ratio = 1.0;
  std::vector<EdgeId> degenerate_edges;
  std::vector<std::string> warnings;
  // min over equilibria and alternatives F' of
  //   A * sum_e pi_e f'_e - sum_e pi_e f_e
  // with pi_e = c(f_e) - c(f_e - 1) (entry price c(1) - c(0) on unused edges)
  double variational_margin_min = kInfinity;
  // min over equilibria and F' of sum_e [c(f_e+1) - c(f_e)] f'_e - P(F)
  double equilibrium_inequality_margin_min = kInfinity;
  std::size_t distributions = 0;
  std::size_t equilibria_checked = 0;
};

inline double marginal_growth_ratio(const Instance& inst, std::vector<EdgeId>* degenerate = nullptr) {
  double ratio = 1.0;
  const int K = inst.max_load();
  for (EdgeId e = 0; e < inst.num_edges(); ++e) {
    const auto table = inst.cost_table(e);
    bool bad = false;
    double edge_max = 1.0;
    for (int f = 1; f <= K - 1; ++f) {
      const double below = table[f] - table[f - 1];
      if (below <= price_tolerance(table[f])) {
        bad = true;
        break;
      }
      edge_max = std::max(edge_max, (table[f + 1] - table[f]) / below);
    }
    if (bad) {
      if (degenerate) degenerate->push_back(e);
      continue;
    }
    ratio = std::max(ratio, edge_max);
  }
  return ratio;
}

inline AnarchyDiagnostics anarchy_diagnostics(const Instance& inst, const PathCatalog& catalog,
                                              std::span<const FlowDistribution> equilibria,
                                              std::size_t cap = kDefaultEnumerationCap) {
  AnarchyDiagnostics diag;
  diag.marginal_growth_ratio = marginal_growth_ratio(inst, &diag.degenerate_edges);
  for (EdgeId e : diag.degenerate_edges) {
    diag.warnings.push_back("edge " + inst.edge_name(e) +
                            " has a zero cost increment; excluded from the growth ratio");
  }

  const std::size_t E = inst.num_edges();
  struct EquilibriumTerms {
    std::vector<double> price;    // pi_e
    std::vector<double> upward;   // c(f_e + 1) - c(f_e), polynomial beyond K
    double total_price = 0.0;
  };
  std::vector<EquilibriumTerms> terms;
  for (const auto& eq : equilibria) {
    require_fully_assigned(eq);
    EquilibriumTerms t{std::vector<double>(E), std::vector<double>(E), 0.0};
    for (EdgeId e = 0; e < E; ++e) {
      const int f = eq.load(e);
      const auto& model = inst.cost_model(e);
      t.price[e] = f >= 1 ? inst.expected_edge_cost(e, f) - inst.expected_edge_cost(e, f - 1)
                          : inst.expected_edge_cost(e, 1) - inst.expected_edge_cost(e, 0);
      t.upward[e] = model.evaluate(f + 1.0) - model.evaluate(f);
      if (f >= 1) t.total_price += t.price[e] * f;
    }
    terms.push_back(std::move(t));
  }
  diag.equilibria_checked = terms.size();

  for_each_distribution(inst, catalog, cap, [&](auto, std::span<const int> loads) {
    ++diag.distributions;
    const double cost = expected_cost_of_loads(inst, loads);
    const double price = total_price_of_loads(inst, loads);
    diag.cost_price_margin_min = std::min(diag.cost_price_margin_min, price - cost);
    if (cost > 0.0) {
      diag.price_cost_ratio_min = std::min(diag.price_cost_ratio_min, price / cost);
      diag.price_cost_ratio_max = std::max(diag.price_cost_ratio_max, price / cost);
    }
    for (const auto& t : terms) {
      double against = 0.0;
      double upward = 0.0;
      for (EdgeId e = 0; e < E; ++e) {
        against += t.price[e] * loads[e];
        upward += t.upward[e] * loads[e];
      }
      diag.variational_margin_min =
          std::min(diag.variational_margin_min, diag.marginal_growth_ratio * against - t.total_price);
      diag.equilibrium_inequality_margin_min =
          std::min(diag.equilibrium_inequality_margin_min, upward - t.total_price);
    }
  });
  return diag;
}

struct PoaReport {
  std::string digest;
  FlowDistribution equilibrium;
  std::size_t circles_used = 0;
  std::size_t rerouting_circles = 0;
  double equilibrium_cost = 0.0;
  double optimum_cost = 0.0;
  double ratio = 0.0;
  std::optional<double> bound;  // absent when some coefficient is negative
  AnarchyDiagnostics diagnostics;
};

// Plays the known-model game to equilibrium and certifies it against the
// enumerated optimum.
inline PoaReport poa_report(const Instance& inst, std::size_t cap = kDefaultEnumerationCap) {
  const PathCatalog catalog(inst);
  catalog.require_within(cap);
  PoaReport report;
  report.digest = inst.digest();
  const EquilibriumResult eq = run_to_equilibrium(inst);
  report.equilibrium = eq.distribution;
  report.circles_used = eq.circles_used;
  report.rerouting_circles = eq.rerouting_circles;
  report.equilibrium_cost = expected_total_cost(inst, eq.distribution);
  const OptimumResult opt = brute_force_optimum(inst, catalog, cap);
  report.optimum_cost = opt.cost;
  if (opt.cost <= 0.0) {
    throw Error(ErrorKind::DegenerateInstance, "optimum expected cost is zero");
  }
  report.ratio = report.equilibrium_cost / opt.cost;
  try {
    report.bound = polynomial_anarchy_bound(inst);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::NegativeCoefficient) throw;
  }
  report.diagnostics = anarchy_diagnostics(inst, catalog, std::span(&report.equilibrium, 1), cap);
  return report;
}

}  // namespace flowsched
