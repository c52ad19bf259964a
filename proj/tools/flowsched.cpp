#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "flowsched/flowsched.hpp"
#include "flowsched/io/csv.hpp"
#include "flowsched/io/scenario.hpp"
#include "flowsched/io/svg.hpp"
#include "flowsched/io/tables.hpp"

#ifndef FLOWSCHED_VERSION
#define FLOWSCHED_VERSION "dev"
#endif

namespace fs = std::filesystem;
using namespace flowsched;
using io::Json;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::size_t jobs = 1;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool config_required) {
  auto* config = cmd->add_option("--config", opts.config, "Scenario file (JSON)");
  if (config_required) config->required();
  config->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "Top-level seed, overrides the scenario seed");
  cmd->add_option("--out", opts.out, "Output directory")->envname("FLOWSCHED_OUT")->capture_default_str();
  cmd->add_option("--jobs", opts.jobs, "Worker threads")
      ->envname("FLOWSCHED_JOBS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Collects artifacts of one command and writes the manifest that lists them.
class RunRecorder {
 public:
  RunRecorder(std::string command, const CommonOptions& opts)
      : command_(std::move(command)),
        dir_(opts.out),
        started_(utc_now()),
        clock_start_(std::chrono::steady_clock::now()) {
    fs::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    io::write_file_atomic(path, content);
    artifacts_.push_back(path.string());
  }

  void finish(Json config, std::uint64_t seed) {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start_).count();
    Json manifest;
    manifest["command"] = command_;
    manifest["tool_version"] = FLOWSCHED_VERSION;
    manifest["seed"] = seed;
    manifest["config"] = std::move(config);
    manifest["artifacts"] = artifacts_;
    manifest["started_utc"] = started_;
    manifest["finished_utc"] = utc_now();
    manifest["elapsed_seconds"] = elapsed;
    io::write_file_atomic(dir_ / (command_ + ".manifest.json"), manifest.dump(2) + "\n");
  }

 private:
  std::string command_;
  fs::path dir_;
  std::string started_;
  std::chrono::steady_clock::time_point clock_start_;
  std::vector<std::string> artifacts_;
};

struct LoadedScenario {
  Json document;
  ScenarioConfig config;
  Instance instance;
};

LoadedScenario load_scenario(const CommonOptions& opts) {
  Json doc = io::load_document(opts.config);
  ScenarioConfig cfg = io::scenario_from_json(doc);
  if (opts.seed) cfg.seed = *opts.seed;
  Instance inst = build_instance(cfg);
  return {std::move(doc), std::move(cfg), std::move(inst)};
}

int cmd_run_known(const CommonOptions& opts, bool record_messages) {
  const LoadedScenario sc = load_scenario(opts);
  const Instance& inst = sc.instance;
  RunRecorder rec("run-known", opts);

  VirtualGame<ExactPrices> game(inst, ExactPrices(inst));
  game.record_messages(record_messages);
  const EquilibriumResult eq = run_to_equilibrium(game);
  const double cost = expected_total_cost(inst, eq.distribution);
  const bool nash = is_nash(inst, eq.distribution);
  std::optional<std::size_t> bound;
  std::string bound_note;
  try {
    bound = convergence_bound(inst);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::DegenerateInstance && err.kind() != ErrorKind::EnumerationCapExceeded) throw;
    bound_note = err.what();
  }

  rec.write("moves.csv", io::move_log_csv(inst, game.moves()));
  rec.write("assignment.csv", io::assignment_csv(inst, eq.distribution));
  io::CsvWriter summary({"digest", "final_cost", "is_nash", "circles_used", "rerouting_circles",
                         "convergence_bound", "within_bound"});
  summary.field(inst.digest()).field(cost).field(nash).field(eq.circles_used).field(eq.rerouting_circles);
  if (bound) {
    summary.field(*bound).field(eq.rerouting_circles <= *bound);
  } else {
    summary.field("").field("");
  }
  summary.end_row();
  rec.write("summary.csv", summary.str());
  if (record_messages) rec.write("messages.csv", io::game_messages_csv(inst, game.messages()));
  rec.finish(io::scenario_to_json(sc.config), sc.config.seed);

  std::cout << "final cost " << io::format_double(cost) << ", nash " << (nash ? "yes" : "no") << ", circles "
            << eq.circles_used << " (" << eq.rerouting_circles << " rerouting)";
  if (bound) {
    std::cout << ", bound " << *bound;
  } else {
    std::cout << ", bound unavailable: " << bound_note;
  }
  std::cout << "\n";
  return 0;
}

struct PoaFlags {
  std::optional<std::size_t> samples;
  std::vector<int> orders;
  bool pooled = false;
  bool plot = false;
};

int cmd_poa_study(const CommonOptions& opts, const PoaFlags& flags) {
  Json doc = opts.config.empty() ? Json::object() : io::load_document(opts.config);
  PoaStudyConfig cfg = io::poa_study_from_json(doc);
  if (opts.seed) cfg.seed = *opts.seed;
  if (flags.samples) cfg.samples = *flags.samples;
  if (!flags.orders.empty()) cfg.orders = flags.orders;
  if (flags.pooled) cfg.per_order = false;
  cfg.jobs = opts.jobs;

  RunRecorder rec("poa-study", opts);
  const PoaStudyResult result = poa_study(cfg);
  rec.write("poa_records.csv", io::poa_records_csv(result.records));
  rec.write("poa_histogram.csv", io::histogram_csv(result.histogram));
  if (flags.plot) rec.write("poa_histogram.svg", io::histogram_svg(result.histogram));
  rec.finish(io::poa_study_to_json(cfg), cfg.seed);

  for (int order : cfg.orders) {
    std::cout << "order " << order << ": skipped " << result.skipped.at(order) << ", mass in [1, 1.1) "
              << io::format_double(ratio_mass(result.records, order, 1.0, 1.1)) << ", mass above 1.3 "
              << io::format_double(ratio_mass(result.records, order, 1.3, kInfinity)) << "\n";
  }
  return 0;
}

struct RegretFlags {
  std::optional<double> g_base;
  std::vector<double> multipliers;
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> replications;
  std::vector<std::size_t> checkpoints;
  bool bound = false;
  bool plot = false;
  bool trace = false;
  std::size_t mc_periods = 20'000;
};

Json g_bound_json(const GBound& b) {
  const auto& p = b.params;
  return {{"d", p.d}, {"sigma2", p.sigma2}, {"r", p.r}, {"r_low", p.r_low}, {"r_high", p.r_high},
          {"c", p.c}, {"g_star", b.g_star}};
}

std::string g_bound_csv(const GBound& b) {
  const auto& p = b.params;
  io::CsvWriter w({"d", "sigma2", "r", "r_low", "r_high", "c", "g_star"});
  w.field(p.d).field(p.sigma2).field(p.r).field(p.r_low).field(p.r_high).field(p.c).field(b.g_star).end_row();
  return w.str();
}

void print_g_bound(const GBound& b) {
  const auto& p = b.params;
  std::cout << "G* = " << io::format_double(b.g_star) << " (d = " << p.d << ", sigma2 = " << io::format_double(p.sigma2)
            << ", r = " << io::format_double(p.r) << " [" << io::format_double(p.r_low) << ", "
            << io::format_double(p.r_high) << "], c = " << io::format_double(p.c) << ")\n";
}

int cmd_regret_study(const CommonOptions& opts, const RegretFlags& flags) {
  const LoadedScenario sc = load_scenario(opts);
  RegretStudyConfig cfg = io::regret_study_from_json(sc.document);
  cfg.seed = sc.config.seed;
  if (flags.g_base) cfg.g_base = *flags.g_base;
  if (!flags.multipliers.empty()) cfg.multipliers = flags.multipliers;
  if (flags.horizon) {
    cfg.horizon = *flags.horizon;
    cfg.checkpoints.clear();
  }
  if (flags.replications) cfg.replications = *flags.replications;
  if (!flags.checkpoints.empty()) cfg.checkpoints = flags.checkpoints;
  cfg.jobs = opts.jobs;

  RunRecorder rec("regret-study", opts);
  Json resolved = io::scenario_to_json(sc.config);
  resolved["regret_study"] = io::regret_study_to_json(cfg);
  if (flags.bound) {
    const GBound b = compute_g_bound(sc.instance, {flags.mc_periods, cfg.seed});
    print_g_bound(b);
    rec.write("g_bound.csv", g_bound_csv(b));
    resolved["g_bound"] = g_bound_json(b);
  }
  const RegretStudyResult result = regret_study(sc.instance, cfg);
  rec.write("regret_curves.csv", io::regret_curves_csv(result.curves));
  rec.write("regret_aggregate.csv", io::regret_aggregate_csv(result.aggregates));
  if (flags.plot) rec.write("regret.svg", io::regret_svg(result.aggregates));
  if (flags.trace) {
    // slot trace of the first replication at the first G value
    const UnknownRunResult run = run_unknown(sc.instance, cfg.g_base * cfg.multipliers.front(), cfg.horizon,
                                             replication_seed(cfg.seed, 0));
    rec.write("slot_trace.csv", io::slot_trace_csv(run.trace));
    rec.write("sample_store.csv", io::sample_store_csv(sc.instance, *run.store));
  }
  rec.finish(resolved, cfg.seed);

  for (const auto& a : result.aggregates) {
    if (a.t != cfg.horizon) continue;
    std::cout << "G = " << io::format_double(a.g) << ": mean regret " << io::format_double(a.mean)
              << " at T = " << a.t << ", regret / ln T = " << io::format_double(a.mean_over_log) << "\n";
  }
  return 0;
}

struct ScheduleFlags {
  double g = 0.0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t horizon = 0;
};

int cmd_schedule_preview(const CommonOptions& opts, const ScheduleFlags& flags) {
  const DseeSchedule schedule = build_schedule(flags.g, flags.n, flags.k, flags.horizon);
  RunRecorder rec("schedule-preview", opts);
  rec.write("schedule.csv", io::schedule_csv(schedule));
  rec.finish({{"G", flags.g}, {"N", flags.n}, {"K", flags.k}, {"horizon", flags.horizon}}, 0);
  std::cout << "explore " << schedule.count(SlotKind::Explore) << ", bellman_ford "
            << schedule.count(SlotKind::BellmanFord) << ", exploit " << schedule.count(SlotKind::Exploit) << "\n";
  return 0;
}

int cmd_bound(const CommonOptions& opts, std::size_t mc_periods) {
  const LoadedScenario sc = load_scenario(opts);
  RunRecorder rec("bound", opts);
  const GBound b = compute_g_bound(sc.instance, {mc_periods, sc.config.seed});
  print_g_bound(b);
  rec.write("g_bound.csv", g_bound_csv(b));
  Json resolved = io::scenario_to_json(sc.config);
  resolved["monte_carlo_periods"] = mc_periods;
  rec.finish(resolved, sc.config.seed);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Congestion-priced flow scheduling experiments"};
  app.set_version_flag("--version", FLOWSCHED_VERSION);
  app.require_subcommand(1);

  CommonOptions known_opts;
  bool record_messages = false;
  auto* known = app.add_subcommand("run-known", "Play the known-cost game to equilibrium");
  add_common(known, known_opts, true);
  known->add_flag("--messages", record_messages, "Also write the distance-vector message log");

  CommonOptions poa_opts;
  PoaFlags poa_flags;
  auto* poa = app.add_subcommand("poa-study", "Price-of-anarchy distribution over random instances");
  add_common(poa, poa_opts, false);
  poa->add_option("--samples", poa_flags.samples, "Samples per polynomial order");
  poa->add_option("--orders", poa_flags.orders, "Polynomial orders to sample");
  poa->add_flag("--pooled", poa_flags.pooled, "One histogram over all orders");
  poa->add_flag("--plot", poa_flags.plot, "Also write an SVG histogram");

  CommonOptions regret_opts;
  RegretFlags regret_flags;
  auto* regret = app.add_subcommand("regret-study", "Regret of the learning schedule over a sweep of G");
  add_common(regret, regret_opts, true);
  regret->add_option("--g-base", regret_flags.g_base, "Base value G_b");
  regret->add_option("--g-multipliers", regret_flags.multipliers, "Multiples of G_b to run");
  regret->add_option("--horizon", regret_flags.horizon, "Slots per run");
  regret->add_option("--replications", regret_flags.replications, "Seeds per G value");
  regret->add_option("--checkpoints", regret_flags.checkpoints, "Horizons at which regret is reported");
  regret->add_flag("--bound", regret_flags.bound, "Also compute the sufficient G and its parameters");
  regret->add_option("--mc-periods", regret_flags.mc_periods, "Monte Carlo periods for the bound")
      ->check(CLI::PositiveNumber);
  regret->add_flag("--plot", regret_flags.plot, "Also write an SVG of regret / ln T");
  regret->add_flag("--trace", regret_flags.trace, "Also write the slot trace of one run");

  CommonOptions schedule_opts;
  ScheduleFlags schedule_flags;
  auto* schedule = app.add_subcommand("schedule-preview", "Dump the exploration/exploitation slot labels");
  add_common(schedule, schedule_opts, false);
  schedule->add_option("--G", schedule_flags.g, "Exploration rate")->required();
  schedule->add_option("--N", schedule_flags.n, "Number of vertices")->required();
  schedule->add_option("--K", schedule_flags.k, "Number of commodities")->required();
  schedule->add_option("--horizon", schedule_flags.horizon, "Number of slots")->required();

  CommonOptions bound_opts;
  std::size_t bound_periods = 20'000;
  auto* bound = app.add_subcommand("bound", "Sufficient G for logarithmic regret");
  add_common(bound, bound_opts, true);
  bound->add_option("--mc-periods", bound_periods, "Monte Carlo periods for r")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*known) return cmd_run_known(known_opts, record_messages);
    if (*poa) return cmd_poa_study(poa_opts, poa_flags);
    if (*regret) return cmd_regret_study(regret_opts, regret_flags);
    if (*schedule) return cmd_schedule_preview(schedule_opts, schedule_flags);
    if (*bound) return cmd_bound(bound_opts, bound_periods);
  } catch (const Error& err) {
    std::cerr << "error (" << to_string(err.kind()) << "): " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 1;
}
