#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cli_runner.hpp"
#include "flowsched/io/scenario.hpp"
#include "support.hpp"

namespace flowsched {
namespace {

namespace fs = std::filesystem;
using testing::read_text;
using testing::run_cli;
using testing::scenario_path;

std::size_t data_rows(const std::string& csv) {
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  return lines == 0 ? 0 : lines - 1;
}

std::vector<std::string> csv_column(const std::string& csv, std::size_t index) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string cell;
    for (std::size_t i = 0; i <= index; ++i) std::getline(row, cell, ',');
    out.push_back(cell);
  }
  return out;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = testing::fresh_dir(std::string("cli-") + info->name());
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

TEST_F(Cli, RunKnownD1) {
  const auto out = dir_ / "out";
  const auto r = run_cli({"run-known", "--config", scenario_path("d1.json"), "--out", out.string()}, dir_);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("final cost 2, nash yes"), std::string::npos) << r.out;
  const std::string summary = read_text(out / "summary.csv");
  EXPECT_EQ(csv_column(summary, 1), std::vector<std::string>{"2"});
  EXPECT_EQ(csv_column(summary, 2), std::vector<std::string>{"true"});
  EXPECT_EQ(data_rows(read_text(out / "assignment.csv")), 2u);
  EXPECT_TRUE(fs::exists(out / "moves.csv"));
  EXPECT_FALSE(fs::exists(out / "messages.csv"));
  const auto manifest = io::parse_json_text(read_text(out / "run-known.manifest.json"), "manifest");
  EXPECT_EQ(manifest.at("command"), "run-known");
  EXPECT_EQ(manifest.at("seed"), 1);
}

TEST_F(Cli, RunKnownWritesMessagesOnRequest) {
  const auto out = dir_ / "out";
  const auto r =
      run_cli({"run-known", "--config", scenario_path("d1.json"), "--out", out.string(), "--messages"}, dir_);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_GT(data_rows(read_text(out / "messages.csv")), 0u);
}

TEST_F(Cli, DisconnectedCommodityNamesTheCommodity) {
  ScenarioConfig cfg = testing::d1_config();
  cfg.vertices.push_back("w");
  cfg.commodities.push_back({"u", "w"});
  const auto path = dir_ / "broken.json";
  std::ofstream(path) << io::scenario_to_json(cfg).dump(2);
  const auto r = run_cli({"run-known", "--config", path.string(), "--out", (dir_ / "out").string()}, dir_);
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.err.find("disconnected_commodity"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("commodity 2"), std::string::npos) << r.err;
}

TEST_F(Cli, MissingConfigFails) {
  const auto r = run_cli({"run-known", "--config", (dir_ / "nope.json").string()}, dir_);
  EXPECT_NE(r.exit_code, 0);
}

TEST_F(Cli, RunKnownIsByteReproducible) {
  for (const char* name : {"a", "b"}) {
    const auto r =
        run_cli({"run-known", "--config", scenario_path("regret_desk.json"), "--out", (dir_ / name).string()}, dir_);
    ASSERT_EQ(r.exit_code, 0) << r.err;
  }
  for (const char* file : {"moves.csv", "assignment.csv", "summary.csv"}) {
    EXPECT_EQ(read_text(dir_ / "a" / file), read_text(dir_ / "b" / file)) << file;
  }
}

TEST_F(Cli, PoaStudyHistogramAccountsForSamples) {
  const auto out = dir_ / "out";
  const auto r = run_cli({"poa-study", "--samples", "100", "--seed", "4", "--out", out.string(), "--plot"}, dir_);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const std::string records = read_text(out / "poa_records.csv");
  EXPECT_EQ(data_rows(records), 200u);
  const auto orders = csv_column(records, 0);
  const auto skipped = csv_column(records, 6);
  const std::string hist = read_text(out / "poa_histogram.csv");
  const auto counts = csv_column(hist, 2);
  const auto hist_orders = csv_column(hist, 3);
  for (const std::string order : {"2", "3"}) {
    std::size_t kept = 0;
    for (std::size_t i = 0; i < orders.size(); ++i) kept += orders[i] == order && skipped[i] == "false";
    std::size_t binned = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (hist_orders[i] == order) binned += std::stoul(counts[i]);
    }
    EXPECT_EQ(binned, kept) << "order " << order;
  }
  EXPECT_TRUE(fs::exists(out / "poa_histogram.svg"));
  EXPECT_NE(r.out.find("order 3"), std::string::npos);
}

TEST_F(Cli, RegretStudyMultipliersAndBound) {
  const auto out = dir_ / "out";
  const auto r = run_cli({"regret-study", "--config", scenario_path("d1.json"), "--g-base", "5", "--g-multipliers",
                          "0.2", "1", "4", "--horizon", "2000", "--replications", "2", "--bound", "--mc-periods",
                          "2000", "--trace", "--out", out.string()},
                         dir_);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("G* = "), std::string::npos);
  const auto gs = csv_column(read_text(out / "regret_curves.csv"), 3);
  std::set<std::string> families(gs.begin(), gs.end());
  EXPECT_EQ(families, (std::set<std::string>{"1", "5", "20"}));
  EXPECT_TRUE(fs::exists(out / "g_bound.csv"));
  EXPECT_EQ(data_rows(read_text(out / "slot_trace.csv")), 2000u);
  EXPECT_TRUE(fs::exists(out / "sample_store.csv"));
}

TEST_F(Cli, RegretStudyRejectsCheckpointBeyondHorizon) {
  const auto r = run_cli({"regret-study", "--config", scenario_path("d1.json"), "--horizon", "100",
                          "--replications", "1", "--checkpoints", "50", "200", "--out", (dir_ / "out").string()},
                         dir_);
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.err.find("checkpoint_out_of_range"), std::string::npos) << r.err;
}

TEST_F(Cli, SchedulePreviewStartsWithExplorationThenBlock) {
  const auto out = dir_ / "out";
  const auto r =
      run_cli({"schedule-preview", "--G", "1", "--N", "3", "--K", "2", "--horizon", "200", "--out", out.string()},
              dir_);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto kinds = csv_column(read_text(out / "schedule.csv"), 1);
  ASSERT_EQ(kinds.size(), 200u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(kinds[i], "explore");
  for (std::size_t i = 3; i < 9; ++i) EXPECT_EQ(kinds[i], "bellman_ford");
}

TEST_F(Cli, SchedulePreviewRejectsShortHorizon) {
  const auto r = run_cli(
      {"schedule-preview", "--G", "1", "--N", "3", "--K", "2", "--horizon", "5", "--out", (dir_ / "o").string()},
      dir_);
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.err.find("invalid_argument"), std::string::npos) << r.err;
}

TEST_F(Cli, BoundOnD1) {
  const auto out = dir_ / "out";
  const auto r = run_cli({"bound", "--config", scenario_path("d1.json"), "--out", out.string()}, dir_);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("d = 2, sigma2 = 0"), std::string::npos) << r.out;
  EXPECT_EQ(data_rows(read_text(out / "g_bound.csv")), 1u);
}

}  // namespace
}  // namespace flowsched
