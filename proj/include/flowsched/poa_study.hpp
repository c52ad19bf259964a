#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowsched/error.hpp"
#include "flowsched/instance_sampler.hpp"
#include "flowsched/parallel.hpp"
#include "flowsched/poa_analysis.hpp"
#include "flowsched/random.hpp"

namespace flowsched {

struct PoaStudyConfig {
  std::size_t samples = 500;  // per polynomial order
  std::vector<int> orders{2, 3};
  InstanceSampling sampling;  // degree range is overridden by each order
  double bin_width = 0.05;
  double histogram_max = 3.0;  // last bin is [histogram_max, inf)
  bool per_order = true;
  std::size_t enumeration_cap = 200'000;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

struct PoaRecord {
  int order = 0;
  std::size_t sample = 0;
  bool skipped = false;
  std::string skip_reason;
  std::string digest;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t commodities = 0;
  std::size_t circles_used = 0;
  double equilibrium_cost = 0.0;
  double optimum_cost = 0.0;
  double ratio = 0.0;
  double bound = 0.0;
  double price_cost_ratio_min = 0.0;
  double price_cost_ratio_max = 0.0;
  double marginal_growth_ratio = 0.0;
  double variational_margin_min = 0.0;
};

struct HistogramBin {
  int order = 0;  // 0 when orders are pooled
  double low = 0.0;
  double high = 0.0;  // +inf for the overflow bin
  std::size_t count = 0;
};

struct PoaStudyResult {
  std::vector<PoaRecord> records;
  std::vector<HistogramBin> histogram;
  std::map<int, std::size_t> skipped;
};

inline std::vector<HistogramBin> ratio_histogram(const std::vector<PoaRecord>& records, int order,
                                                 double bin_width, double histogram_max) {
  if (!(bin_width > 0.0) || !(histogram_max > 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "histogram needs bin_width > 0 and histogram_max > 1");
  }
  const auto bins = static_cast<std::size_t>(std::ceil((histogram_max - 1.0) / bin_width - 1e-9));
  std::vector<HistogramBin> out;
  for (std::size_t i = 0; i < bins; ++i) {
    out.push_back({order, 1.0 + i * bin_width, std::min(histogram_max, 1.0 + (i + 1) * bin_width), 0});
  }
  out.push_back({order, histogram_max, kInfinity, 0});
  for (const auto& r : records) {
    if (r.skipped || (order != 0 && r.order != order)) continue;
    // ratios a hair below 1 are rounding noise on an optimal equilibrium
    const double x = std::max(r.ratio, 1.0);
    const auto idx = x >= histogram_max ? bins
                                        : std::min(bins - 1, static_cast<std::size_t>((x - 1.0) / bin_width));
    ++out[idx].count;
  }
  return out;
}

// Samples random instances per polynomial order, plays each to equilibrium
// and records its price of anarchy. Sample i of order d always uses the same
// RNG substream, so results do not depend on the job count.
inline PoaStudyResult poa_study(const PoaStudyConfig& cfg) {
  if (cfg.orders.empty()) throw Error(ErrorKind::MalformedConfig, "poa study needs at least one order");
  PoaStudyResult result;
  result.records.resize(cfg.orders.size() * cfg.samples);
  parallel_for(result.records.size(), cfg.jobs, [&](std::size_t idx) {
    const int order = cfg.orders[idx / cfg.samples];
    PoaRecord& rec = result.records[idx];
    rec.order = order;
    rec.sample = idx % cfg.samples;
    InstanceSampling law = cfg.sampling;
    law.degree_min = law.degree_max = order;
    Rng rng = make_stream(cfg.seed, "instance-sampling", static_cast<std::uint64_t>(order) << 32 | rec.sample);
    const Instance inst = build_instance(sample_scenario(law, rng));
    rec.digest = inst.digest();
    rec.vertices = inst.num_vertices();
    rec.edges = inst.num_edges();
    rec.commodities = inst.num_commodities();
    try {
      const PoaReport report = poa_report(inst, cfg.enumeration_cap);
      rec.circles_used = report.circles_used;
      rec.equilibrium_cost = report.equilibrium_cost;
      rec.optimum_cost = report.optimum_cost;
      rec.ratio = report.ratio;
      rec.bound = report.bound.value_or(kInfinity);
      rec.price_cost_ratio_min = report.diagnostics.price_cost_ratio_min;
      rec.price_cost_ratio_max = report.diagnostics.price_cost_ratio_max;
      rec.marginal_growth_ratio = report.diagnostics.marginal_growth_ratio;
      rec.variational_margin_min = report.diagnostics.variational_margin_min;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::EnumerationCapExceeded) throw;
      rec.skipped = true;
      rec.skip_reason = err.what();
    }
  });

  for (int order : cfg.orders) result.skipped[order] = 0;
  for (const auto& r : result.records) {
    if (r.skipped) ++result.skipped[r.order];
  }
  if (cfg.per_order) {
    for (int order : cfg.orders) {
      auto bins = ratio_histogram(result.records, order, cfg.bin_width, cfg.histogram_max);
      result.histogram.insert(result.histogram.end(), bins.begin(), bins.end());
    }
  } else {
    result.histogram = ratio_histogram(result.records, 0, cfg.bin_width, cfg.histogram_max);
  }
  return result;
}

// Fraction of non-skipped ratios of `order` in [lo, hi).
inline double ratio_mass(const std::vector<PoaRecord>& records, int order, double lo, double hi) {
  std::size_t total = 0;
  std::size_t inside = 0;
  for (const auto& r : records) {
    if (r.skipped || r.order != order) continue;
    ++total;
    const double x = std::max(r.ratio, 1.0);
    if (x >= lo && x < hi) ++inside;
  }
  return total == 0 ? 0.0 : static_cast<double>(inside) / static_cast<double>(total);
}

}  // namespace flowsched
