#include <gtest/gtest.h>

#include <numeric>

#include "support.hpp"

namespace flowsched {
namespace {

using testing::d1;
using testing::with_paths;

Instance uniform_costs(std::vector<double> coefficients) {
  ScenarioConfig cfg;
  cfg.vertices = {"a", "b", "c"};
  cfg.edges = {{"ab", "a", "b", coefficients, {}}, {"bc", "b", "c", coefficients, {}},
               {"ac", "a", "c", coefficients, {}}};
  cfg.commodities = {{"a", "c"}, {"a", "b"}};
  return build_instance(cfg);
}

TEST(BruteForceOptimum, D1Split) {
  const Instance inst = d1();
  const OptimumResult opt = brute_force_optimum(inst);
  EXPECT_EQ(opt.cost, 2.0);
  EXPECT_EQ(opt.distribution.load(0), 1);
  EXPECT_EQ(opt.distribution.load(1), 1);
}

TEST(BruteForceOptimum, SingleCommodityIsShortestPath) {
  ScenarioConfig cfg;
  cfg.vertices = {"a", "b", "c"};
  cfg.edges = {{"ab", "a", "b", {1, 0}, {}}, {"bc", "b", "c", {2, 0}, {}}, {"ac", "a", "c", {4, 0}, {}}};
  cfg.commodities = {{"a", "c"}};
  const Instance inst = build_instance(cfg);
  const OptimumResult opt = brute_force_optimum(inst);
  EXPECT_EQ(opt.cost, 3.0);
  EXPECT_EQ(*opt.distribution.path(0), (Path{0, 1}));
}

TEST(BruteForceOptimum, NeverWorseThanEquilibriumAndMatchesOracle) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Instance inst = testing::random_instance(seed);
    const OptimumResult opt = brute_force_optimum(inst);
    const auto costs = testing::all_distribution_costs(inst);
    EXPECT_NEAR(opt.cost, *std::min_element(costs.begin(), costs.end()), 1e-9 * std::max(1.0, opt.cost));
    const EquilibriumResult eq = run_to_equilibrium(inst);
    EXPECT_LE(opt.cost, expected_total_cost(inst, eq.distribution));
  }
}

TEST(BruteForceOptimum, EnumerationCap) {
  const Instance inst = d1();
  try {
    brute_force_optimum(inst, 3);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::EnumerationCapExceeded);
  }
}

TEST(PriceOfAnarchy, D1IsOne) {
  const Instance inst = d1();
  EXPECT_EQ(price_of_anarchy(inst, with_paths(inst, {{0}, {1}})), 1.0);
  EXPECT_THROW(price_of_anarchy(inst, with_paths(inst, {{0}, {0}})), Error);
}

TEST(PriceOfAnarchy, ConvergingToOptimumGivesOne) {
  const Instance inst = testing::line_graph();
  EXPECT_EQ(price_of_anarchy(inst, run_to_equilibrium(inst).distribution), 1.0);
}

TEST(PriceOfAnarchy, SuboptimalEquilibriumWithinBound) {
  // search small random two-user instances for a strictly suboptimal equilibrium
  InstanceSampling law = testing::desk_law(2);
  law.commodities_min = law.commodities_max = 2;
  bool found = false;
  for (std::uint64_t seed = 0; seed < 2000 && !found; ++seed) {
    const Instance inst = testing::random_instance(seed, law);
    const PathCatalog catalog(inst);
    const OptimumResult opt = brute_force_optimum(inst, catalog);
    for_each_distribution(inst, catalog, kDefaultEnumerationCap, [&](std::span<const std::size_t> choice, auto) {
      if (found) return;
      const auto dist = materialize(inst, catalog, std::vector<std::size_t>(choice.begin(), choice.end()));
      if (!is_nash(inst, catalog, dist) || expected_total_cost(inst, dist) <= opt.cost * (1 + 1e-9)) return;
      const double ratio = price_of_anarchy(inst, dist);
      EXPECT_GT(ratio, 1.0);
      EXPECT_LE(ratio, polynomial_anarchy_bound(inst));
      found = true;
    });
  }
  EXPECT_TRUE(found);
}

TEST(PolynomialAnarchyBound, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(polynomial_anarchy_bound(uniform_costs({1, 0})), 2.0);
  EXPECT_DOUBLE_EQ(polynomial_anarchy_bound(uniform_costs({1, 0, 0})), 9.0);
  // (d+1) L / s with L = c(1) - c(0) = 3 and s = 1
  EXPECT_DOUBLE_EQ(polynomial_anarchy_bound(uniform_costs({2, 1, 0})), std::pow(3.0 * 3.0 / 1.0, 2));
}

TEST(PolynomialAnarchyBound, MonotoneInDegree) {
  ScenarioConfig cfg;
  cfg.vertices = {"a", "b"};
  cfg.edges = {{"lin", "a", "b", {1, 0}, {}}, {"sq", "a", "b", {1, 0, 0}, {}}};
  cfg.commodities = {{"a", "b"}, {"a", "b"}};
  const double mixed = polynomial_anarchy_bound(build_instance(cfg));
  cfg.edges[1].coefficients = {1, 0, 0, 0};
  const double higher = polynomial_anarchy_bound(build_instance(cfg));
  EXPECT_EQ(mixed, 9.0);
  EXPECT_EQ(higher, 64.0);
  EXPECT_LT(mixed, higher);
}

TEST(PolynomialAnarchyBound, RejectsNegativeCoefficient) {
  ScenarioConfig cfg = testing::d1_config();
  // f^2 - 0.5 f + 1 is monotone and convex on 0..2 but has a negative term
  cfg.edges[0].coefficients = {1, -0.5, 1};
  try {
    polynomial_anarchy_bound(build_instance(cfg));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::NegativeCoefficient);
  }
}

TEST(PolynomialAnarchyBound, UnitIncrementEqualsCoefficientSum) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Instance inst = testing::random_instance(seed);
    for (EdgeId e = 0; e < inst.num_edges(); ++e) {
      const auto& coef = inst.cost_model(e).coefficients;
      const double sum = std::accumulate(coef.begin(), coef.end() - 1, 0.0);
      EXPECT_NEAR(inst.expected_edge_cost(e, 1) - inst.expected_edge_cost(e, 0), sum, 1e-12 * std::max(1.0, sum));
    }
  }
}

TEST(AnarchyDiagnostics, D1Values) {
  const Instance inst = d1();
  const PathCatalog catalog(inst);
  const FlowDistribution eq = run_to_equilibrium(inst).distribution;
  const AnarchyDiagnostics diag = anarchy_diagnostics(inst, catalog, std::span(&eq, 1));
  EXPECT_EQ(diag.price_cost_ratio_min, 1.0);
  EXPECT_EQ(diag.price_cost_ratio_max, 1.5);
  EXPECT_EQ(diag.distributions, 4u);
  EXPECT_EQ(diag.marginal_growth_ratio, 3.0);
  EXPECT_GE(diag.variational_margin_min, 0.0);
  EXPECT_GE(diag.equilibrium_inequality_margin_min, 0.0);
  EXPECT_GE(diag.cost_price_margin_min, 0.0);
}

TEST(AnarchyDiagnostics, QuadraticGrowthRatio) {
  ScenarioConfig cfg;
  cfg.vertices = {"a", "b"};
  cfg.edges = {{"sq", "a", "b", {1, 0, 0}, {}}};
  cfg.commodities.assign(5, {"a", "b"});
  // increments 1, 3, 5, 7, 9: the largest ratio is 3 at load 1
  EXPECT_EQ(marginal_growth_ratio(build_instance(cfg)), 3.0);
}

TEST(AnarchyDiagnostics, FlagsZeroIncrementEdges) {
  ScenarioConfig cfg;
  cfg.vertices = {"a", "b"};
  // f^2 - f: increments 0, 2, 4; zero first increment
  cfg.edges = {{"flat", "a", "b", {1, -1, 0}, {}}, {"sq", "a", "b", {1, 0, 0}, {}}};
  cfg.commodities.assign(3, {"a", "b"});
  const Instance inst = build_instance(cfg);
  std::vector<EdgeId> degenerate;
  EXPECT_EQ(marginal_growth_ratio(inst, &degenerate), 3.0);
  EXPECT_EQ(degenerate, std::vector<EdgeId>{0});
  const AnarchyDiagnostics diag = anarchy_diagnostics(inst, PathCatalog(inst), {});
  EXPECT_EQ(diag.warnings.size(), 1u);
}

TEST(AnarchyDiagnostics, InequalitiesHoldOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Instance inst = testing::random_instance(seed);
    const PoaReport report = poa_report(inst);
    const auto& d = report.diagnostics;
    const double tol = 1e-9 * std::max(1.0, report.equilibrium_cost);
    EXPECT_GE(d.cost_price_margin_min, -tol) << "seed " << seed;
    EXPECT_GE(d.variational_margin_min, -tol) << "seed " << seed;
    EXPECT_GT(d.price_cost_ratio_min, 0.0);
    EXPECT_LT(d.price_cost_ratio_max, kInfinity);
    EXPECT_GE(report.ratio, 1.0);
    ASSERT_TRUE(report.bound.has_value());
    EXPECT_LE(report.ratio, *report.bound);
  }
}

}  // namespace
}  // namespace flowsched
