#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "flowsched/dsee_learning.hpp"
#include "flowsched/error.hpp"
#include "flowsched/network_model.hpp"
#include "flowsched/parallel.hpp"

namespace flowsched {

struct RegretPoint {
  std::size_t t = 0;
  std::size_t regret = 0;
  double regret_over_log = 0.0;  // regret / ln t, 0 at t = 1
};

struct RegretCurve {
  double g = 0.0;
  std::uint64_t seed = 0;
  std::string digest;
  std::vector<RegretPoint> points;
};

// A slot counts toward regret when no flow is carried (exploration and
// Bellman-Ford slots) or when the carried distribution is not an equilibrium.
inline bool is_regret_slot(const SlotRecord& slot) {
  return slot.kind != SlotKind::Exploit || !slot.at_nash;
}

inline double over_log(std::size_t value, std::size_t t) {
  return t > 1 ? static_cast<double>(value) / std::log(static_cast<double>(t)) : 0.0;
}

inline RegretCurve regret_trace(const std::vector<SlotRecord>& trace, std::vector<std::size_t> checkpoints) {
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  RegretCurve curve;
  if (!checkpoints.empty() && (checkpoints.front() == 0 || checkpoints.back() > trace.size())) {
    throw Error(ErrorKind::CheckpointOutOfRange,
                "checkpoints must lie in 1.." + std::to_string(trace.size()));
  }
  std::size_t regret = 0;
  std::size_t t = 0;
  for (std::size_t cp : checkpoints) {
    for (; t < cp; ++t) regret += is_regret_slot(trace[t]) ? 1 : 0;
    curve.points.push_back({cp, regret, over_log(regret, cp)});
  }
  return curve;
}

// Powers of two up to horizon, plus horizon itself.
inline std::vector<std::size_t> geometric_checkpoints(std::size_t horizon) {
  std::vector<std::size_t> out;
  for (std::size_t t = 1; t <= horizon; t *= 2) {
    out.push_back(t);
    if (t > horizon / 2) break;
  }
  if (out.empty() || out.back() != horizon) out.push_back(horizon);
  return out;
}

// Cost-based regret: sum over exploit slots of (realized cost - reference)
// plus a fixed charge for every slot that carries no flow.
inline double classic_regret(const std::vector<SlotRecord>& trace, std::size_t horizon, double reference,
                             double idle_charge) {
  if (horizon > trace.size()) {
    throw Error(ErrorKind::CheckpointOutOfRange, "horizon beyond trace length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < horizon; ++i) {
    const SlotRecord& s = trace[i];
    total += s.kind == SlotKind::Exploit ? s.realized_cost - reference : idle_charge;
  }
  return total;
}

struct RegretStudyConfig {
  double g_base = 1.0;
  std::vector<double> multipliers{1.0};
  std::size_t horizon = 100'000;
  std::vector<std::size_t> checkpoints;  // empty means geometric_checkpoints(horizon)
  std::size_t replications = 20;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

struct RegretAggregate {
  double g = 0.0;
  double multiplier = 0.0;
  std::size_t t = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double stddev = 0.0;
  double mean_over_log = 0.0;
};

struct RegretStudyResult {
  std::string digest;
  std::vector<RegretCurve> curves;  // multiplier-major, replication-minor
  std::vector<RegretAggregate> aggregates;
};

// Seed of replication i; shared across G values so curves differ only in G.
inline std::uint64_t replication_seed(std::uint64_t seed, std::size_t replication) {
  return make_stream(seed, "regret-replication", replication)();
}

inline RegretStudyResult regret_study(const Instance& inst, const RegretStudyConfig& cfg) {
  if (!(cfg.g_base > 0.0)) throw Error(ErrorKind::MalformedConfig, "G_b must be positive");
  if (cfg.multipliers.empty()) throw Error(ErrorKind::MalformedConfig, "need at least one G multiplier");
  if (cfg.replications == 0) throw Error(ErrorKind::MalformedConfig, "need at least one replication");
  for (double m : cfg.multipliers) {
    if (!(m > 0.0)) throw Error(ErrorKind::MalformedConfig, "G multipliers must be positive");
  }
  const auto checkpoints = cfg.checkpoints.empty() ? geometric_checkpoints(cfg.horizon) : cfg.checkpoints;

  RegretStudyResult result;
  result.digest = inst.digest();
  const std::size_t R = cfg.replications;
  result.curves.resize(cfg.multipliers.size() * R);
  parallel_for(result.curves.size(), cfg.jobs, [&](std::size_t idx) {
    const double g = cfg.g_base * cfg.multipliers[idx / R];
    const std::uint64_t seed = replication_seed(cfg.seed, idx % R);
    const UnknownRunResult run = run_unknown(inst, g, cfg.horizon, seed);
    RegretCurve curve = regret_trace(run.trace, checkpoints);
    curve.g = g;
    curve.seed = seed;
    curve.digest = result.digest;
    result.curves[idx] = std::move(curve);
  });

  for (std::size_t m = 0; m < cfg.multipliers.size(); ++m) {
    const std::size_t points = result.curves[m * R].points.size();
    for (std::size_t p = 0; p < points; ++p) {
      RegretAggregate agg;
      agg.multiplier = cfg.multipliers[m];
      agg.g = cfg.g_base * agg.multiplier;
      agg.t = result.curves[m * R].points[p].t;
      double sum = 0.0;
      double sq = 0.0;
      agg.min = kInfinity;
      agg.max = -kInfinity;
      for (std::size_t r = 0; r < R; ++r) {
        const double v = static_cast<double>(result.curves[m * R + r].points[p].regret);
        sum += v;
        sq += v * v;
        agg.min = std::min(agg.min, v);
        agg.max = std::max(agg.max, v);
      }
      const double n = static_cast<double>(R);
      agg.mean = sum / n;
      agg.stddev = R > 1 ? std::sqrt(std::max(0.0, (sq - n * agg.mean * agg.mean) / (n - 1.0))) : 0.0;
      agg.mean_over_log = agg.t > 1 ? agg.mean / std::log(static_cast<double>(agg.t)) : 0.0;
      result.aggregates.push_back(agg);
    }
  }
  return result;
}

}  // namespace flowsched
