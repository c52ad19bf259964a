#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flowsched/distributed_routing.hpp"
#include "flowsched/dsee_learning.hpp"
#include "flowsched/io/csv.hpp"
#include "flowsched/network_model.hpp"
#include "flowsched/poa_study.hpp"
#include "flowsched/regret_harness.hpp"
#include "flowsched/virtual_game.hpp"

namespace flowsched::io {

// Edge names separated by spaces; empty for "no path".
inline std::string format_path(const Instance& inst, const std::optional<Path>& path) {
  std::string out;
  if (!path) return out;
  for (EdgeId e : *path) {
    if (!out.empty()) out.push_back(' ');
    out += inst.edge_name(e);
  }
  return out;
}

inline std::string move_log_csv(const Instance& inst, const std::vector<MoveRecord>& moves) {
  CsvWriter w({"circle", "user", "old_path", "new_path", "cost_after"});
  for (const auto& m : moves) {
    w.field(m.circle).field(m.user).field(format_path(inst, m.old_path)).field(format_path(inst, m.new_path));
    w.field(m.cost_after).end_row();
  }
  return w.str();
}

inline std::string assignment_csv(const Instance& inst, const FlowDistribution& dist) {
  CsvWriter w({"user", "source", "target", "path", "path_price"});
  for (CommodityId k = 0; k < inst.num_commodities(); ++k) {
    const Commodity& c = inst.commodity(k);
    w.field(k).field(inst.vertex_name(c.source)).field(inst.vertex_name(c.target));
    w.field(format_path(inst, dist.path(k)));
    w.field(dist.assigned(k) ? path_price(inst, dist, k, *dist.path(k)) : 0.0).end_row();
  }
  return w.str();
}

inline std::string game_messages_csv(const Instance& inst, const std::vector<GameMessage>& messages) {
  CsvWriter w({"circle", "user", "round", "sender", "receiver", "edge", "distance"});
  for (const auto& g : messages) {
    const RouterMessage& m = g.message;
    w.field(g.circle).field(g.user).field(m.round).field(inst.vertex_name(m.sender));
    w.field(inst.vertex_name(m.receiver)).field(inst.edge_name(m.edge)).field(m.distance).end_row();
  }
  return w.str();
}

inline std::string poa_records_csv(const std::vector<PoaRecord>& records) {
  CsvWriter w({"order", "sample", "digest", "vertices", "edges", "commodities", "skipped", "circles_used",
               "equilibrium_cost", "optimum_cost", "ratio", "bound", "price_cost_ratio_min",
               "price_cost_ratio_max", "marginal_growth_ratio", "variational_margin_min"});
  for (const auto& r : records) {
    w.field(r.order).field(r.sample).field(r.digest).field(r.vertices).field(r.edges).field(r.commodities);
    w.field(r.skipped).field(r.circles_used).field(r.equilibrium_cost).field(r.optimum_cost).field(r.ratio);
    w.field(r.bound).field(r.price_cost_ratio_min).field(r.price_cost_ratio_max);
    w.field(r.marginal_growth_ratio).field(r.variational_margin_min).end_row();
  }
  return w.str();
}

inline std::string histogram_csv(const std::vector<HistogramBin>& bins) {
  CsvWriter w({"bin_low", "bin_high", "count", "order"});
  for (const auto& b : bins) w.field(b.low).field(b.high).field(b.count).field(b.order).end_row();
  return w.str();
}

inline std::string schedule_csv(const DseeSchedule& schedule) {
  CsvWriter w({"t", "kind", "detail"});
  for (std::size_t t = 1; t <= schedule.horizon(); ++t) {
    const SlotLabel& l = schedule.label(t);
    w.field(t).field(to_string(l.kind)).field(l.detail).end_row();
  }
  return w.str();
}

inline std::string slot_trace_csv(const std::vector<SlotRecord>& trace) {
  CsvWriter w({"t", "kind", "source_or_circle", "at_nash", "realized_cost", "card"});
  for (const auto& s : trace) {
    w.field(s.t).field(to_string(s.kind)).field(s.source_or_circle).field(s.at_nash);
    w.field(s.realized_cost).field(s.card).end_row();
  }
  return w.str();
}

inline std::string sample_store_csv(const Instance& inst, const SampleStore& store) {
  CsvWriter w({"edge", "load", "count", "mean"});
  for (EdgeId e = 0; e < store.num_edges(); ++e) {
    for (int f = 1; f <= store.max_load(); ++f) {
      w.field(inst.edge_name(e)).field(f).field(store.count(e, f)).field(store.mean(e, f)).end_row();
    }
  }
  return w.str();
}

inline std::string regret_curves_csv(const std::vector<RegretCurve>& curves) {
  CsvWriter w({"T", "regret", "regret_over_logT", "G", "seed"});
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      w.field(p.t).field(p.regret).field(p.regret_over_log).field(c.g).field(c.seed).end_row();
    }
  }
  return w.str();
}

inline std::string regret_aggregate_csv(const std::vector<RegretAggregate>& aggregates) {
  CsvWriter w({"G", "multiplier", "T", "mean", "min", "max", "stddev", "mean_over_logT"});
  for (const auto& a : aggregates) {
    w.field(a.g).field(a.multiplier).field(a.t).field(a.mean).field(a.min).field(a.max).field(a.stddev);
    w.field(a.mean_over_log).end_row();
  }
  return w.str();
}

}  // namespace flowsched::io
