#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "flowsched/error.hpp"
#include "flowsched/network_model.hpp"
#include "flowsched/random.hpp"

namespace flowsched {

// Law for drawing random desk-scale scenarios: a random spanning tree plus
// extra edges, random commodity endpoints, and per-edge polynomials with
// nonnegative coefficients and zero constant term.
struct InstanceSampling {
  int vertices_min = 4;
  int vertices_max = 7;
  int extra_edges_min = 1;
  int extra_edges_max = 4;
  int commodities_min = 2;
  int commodities_max = 3;
  int degree_min = 2;
  int degree_max = 2;
  // leading coefficient is log-uniform on [leading_min, leading_max]
  double leading_min = 0.5;
  double leading_max = 2.0;
  // lower-order (non-constant) coefficients: zero with this probability,
  // otherwise uniform on [0, lower_max]
  double lower_zero_probability = 0.5;
  double lower_max = 1.0;
  double noise_half_width = 0.0;
};

inline void validate(const InstanceSampling& law) {
  auto bad_range = [](auto lo, auto hi) { return lo > hi; };
  if (law.vertices_min < 2 || bad_range(law.vertices_min, law.vertices_max) ||
      law.extra_edges_min < 0 || bad_range(law.extra_edges_min, law.extra_edges_max) ||
      law.commodities_min < 1 || bad_range(law.commodities_min, law.commodities_max) ||
      law.degree_min < 1 || bad_range(law.degree_min, law.degree_max) || !(law.leading_min > 0.0) ||
      bad_range(law.leading_min, law.leading_max) || law.lower_max < 0.0 ||
      law.lower_zero_probability < 0.0 || law.lower_zero_probability > 1.0 ||
      law.noise_half_width < 0.0) {
    throw Error(ErrorKind::MalformedConfig, "invalid instance sampling law");
  }
}

template <class Engine>
ScenarioConfig sample_scenario(const InstanceSampling& law, Engine& rng) {
  validate(law);
  auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto uniform_real = [&](double lo, double hi) {
    return lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  ScenarioConfig cfg;
  const int n = uniform_int(law.vertices_min, law.vertices_max);
  for (int v = 0; v < n; ++v) cfg.vertices.push_back("v" + std::to_string(v));

  std::vector<std::pair<int, int>> pairs;
  for (int v = 1; v < n; ++v) pairs.emplace_back(uniform_int(0, v - 1), v);
  const int extra = uniform_int(law.extra_edges_min, law.extra_edges_max);
  for (int i = 0; i < extra; ++i) {
    const int a = uniform_int(0, n - 1);
    int b = uniform_int(0, n - 2);
    if (b >= a) ++b;
    pairs.emplace_back(std::min(a, b), std::max(a, b));
  }

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EdgeSpec edge;
    edge.name = "e" + std::to_string(i);
    edge.u = cfg.vertices[pairs[i].first];
    edge.v = cfg.vertices[pairs[i].second];
    const int d = uniform_int(law.degree_min, law.degree_max);
    const double leading =
        std::exp(uniform_real(std::log(law.leading_min), std::log(law.leading_max)));
    edge.coefficients.push_back(leading);
    for (int j = 1; j < d; ++j) {
      const bool zero = std::bernoulli_distribution(law.lower_zero_probability)(rng);
      edge.coefficients.push_back(zero ? 0.0 : uniform_real(0.0, law.lower_max));
    }
    edge.coefficients.push_back(0.0);
    if (law.noise_half_width > 0.0) {
      edge.noise = NoiseSpec{NoiseFamily::Uniform, law.noise_half_width, {}};
    }
    cfg.edges.push_back(std::move(edge));
  }

  const int K = uniform_int(law.commodities_min, law.commodities_max);
  for (int k = 0; k < K; ++k) {
    const int s = uniform_int(0, n - 1);
    int t = uniform_int(0, n - 2);
    if (t >= s) ++t;
    cfg.commodities.push_back({cfg.vertices[s], cfg.vertices[t]});
  }
  cfg.seed = rng();
  return cfg;
}

}  // namespace flowsched
