#include <gtest/gtest.h>

#include "support.hpp"

namespace flowsched {
namespace {

using testing::d1;
using testing::with_paths;

Instance single_edge(std::vector<double> coefficients, int users) {
  ScenarioConfig cfg;
  cfg.vertices = {"a", "b"};
  cfg.edges = {{"e", "a", "b", std::move(coefficients), {}}};
  for (int k = 0; k < users; ++k) cfg.commodities.push_back({"a", "b"});
  return build_instance(cfg);
}

TEST(EdgePrice, MarginalCostIncrease) {
  const Instance sq = single_edge({1, 0, 0}, 2);
  EXPECT_EQ(edge_price(ExactPrices(sq), 0, 2, 1), 3.0);
  const Instance cubic = single_edge({1, 0, 1, 0}, 2);
  EXPECT_EQ(edge_price(ExactPrices(cubic), 0, 2, 1), 8.0);
  EXPECT_EQ(edge_price(ExactPrices(sq), 0, 1, 1), sq.expected_edge_cost(0, 1));
}

TEST(EdgePrice, RejectsLoadsOutsideRange) {
  const Instance sq = single_edge({1, 0, 0}, 2);
  const ExactPrices prices(sq);
  EXPECT_THROW(prices.edge_price(0, 0, 1), Error);
  EXPECT_THROW(prices.edge_price(0, 3, 1), Error);
  EXPECT_THROW(prices.edge_price(0, 1, -1), Error);
}

TEST(EdgePrice, NonnegativeUnderExactView) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Instance inst = testing::random_instance(seed);
    const ExactPrices prices(inst);
    for (EdgeId e = 0; e < inst.num_edges(); ++e) {
      for (int f = 1; f <= inst.max_load(); ++f) EXPECT_GE(prices.edge_price(e, f, 1), 0.0);
    }
  }
}

TEST(PathPrice, SingleEdgeCases) {
  const Instance inst = d1();
  // user 2 joins e1 where user 1 already rides
  EXPECT_EQ(path_price(inst, with_paths(inst, {{0}, {0}}), 1, {0}), 3.0);
  // user 2 alone on e2
  EXPECT_EQ(path_price(inst, with_paths(inst, {{0}, {1}}), 1, {1}), 1.0);
}

TEST(PathPrice, RejectsPathNotConnectingCommodity) {
  const Instance inst = testing::line_graph();
  const auto dist = with_paths(inst, {{0, 1}});
  EXPECT_THROW(path_price(inst, dist, 0, {0}), Error);
}

TEST(PathPrice, LineGraphEqualsPerEdgeSum) {
  ScenarioConfig cfg;
  cfg.vertices = {"a", "b", "c", "d"};
  cfg.edges = {{"ab", "a", "b", {1, 0, 0}, {}}, {"bc", "b", "c", {2, 1, 0}, {}}, {"cd", "c", "d", {1, 0, 1, 0}, {}}};
  cfg.commodities = {{"a", "d"}, {"b", "d"}};
  const Instance inst = build_instance(cfg);
  const auto dist = with_paths(inst, {{0, 1, 2}, {1, 2}});
  double expected = 0.0;
  for (EdgeId e : Path{0, 1, 2}) {
    const auto& coef = inst.cost_model(e).coefficients;
    const int f = testing::naive_load(dist, e);
    expected += testing::naive_polynomial(coef, f) - testing::naive_polynomial(coef, f - 1);
  }
  EXPECT_DOUBLE_EQ(path_price(inst, dist, 0, {0, 1, 2}), expected);
}

TEST(UserRevenue, D1Values) {
  const Instance inst = d1();
  EXPECT_EQ(user_revenue(inst, with_paths(inst, {{0}, {0}}), 0), 3.0);
  const auto split = with_paths(inst, {{0}, {1}});
  EXPECT_EQ(user_revenue(inst, split, 0), 1.0);
  EXPECT_EQ(user_revenue(inst, split, 1), 1.0);
  FlowDistribution partial(inst);
  partial.assign(0, {0});
  EXPECT_THROW(user_revenue(inst, partial, 1), Error);
}

TEST(UserRevenue, EqualsPathPriceOnRandomStates) {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 100; ++seed) {
    const Instance inst = testing::random_instance(seed);
    const PathCatalog catalog(inst);
    Rng rng = make_stream(seed, "state");
    std::vector<std::size_t> choice;
    for (CommodityId k = 0; k < inst.num_commodities(); ++k) {
      choice.push_back(std::uniform_int_distribution<std::size_t>(0, catalog.paths(k).size() - 1)(rng));
    }
    const auto dist = materialize(inst, catalog, choice);
    for (CommodityId k = 0; k < inst.num_commodities(); ++k) {
      const double revenue = user_revenue(inst, dist, k);
      EXPECT_NEAR(revenue, path_price(inst, dist, k, *dist.path(k)), 1e-9 * std::max(1.0, revenue));
    }
    ++checked;
  }
}

TEST(TotalPrice, D1Values) {
  const Instance inst = d1();
  EXPECT_EQ(total_price(inst, with_paths(inst, {{0}, {1}})), 2.0);
  EXPECT_EQ(total_price(inst, with_paths(inst, {{0}, {0}})), 6.0);
}

TEST(TotalPrice, EqualsSumOfRevenues) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance inst = testing::random_instance(seed);
    const PathCatalog catalog(inst);
    Rng rng = make_stream(seed, "state");
    std::vector<std::size_t> choice;
    for (CommodityId k = 0; k < inst.num_commodities(); ++k) {
      choice.push_back(std::uniform_int_distribution<std::size_t>(0, catalog.paths(k).size() - 1)(rng));
    }
    const auto dist = materialize(inst, catalog, choice);
    double revenues = 0.0;
    for (CommodityId k = 0; k < inst.num_commodities(); ++k) revenues += user_revenue(inst, dist, k);
    const double price = total_price(inst, dist);
    EXPECT_NEAR(price, revenues, 1e-9 * std::max(1.0, price)) << "seed " << seed;
  }
}

TEST(TotalPrice, BoundsExpectedCostForConvexZeroConstantCosts) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Instance inst = testing::random_instance(seed);
    const PathCatalog catalog(inst);
    for_each_distribution(inst, catalog, kDefaultEnumerationCap, [&](auto, std::span<const int> loads) {
      const double cost = expected_cost_of_loads(inst, loads);
      EXPECT_LE(cost, total_price_of_loads(inst, loads) + 1e-9 * std::max(1.0, cost));
    });
  }
}

}  // namespace
}  // namespace flowsched
