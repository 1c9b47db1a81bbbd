#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "inertid/errors.hpp"
#include "inertid/harness/commands.hpp"

namespace inertid::harness {
namespace {
namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CommandsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("inertid_cmd_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    ScenarioConfig c = falcon_stage();
    c.sim.slot_duration = 1.0;
    c.tsc.downsample = 10;
    c.tsc.replicates = 2;
    c.tsc.n_init = 2;
    c.rl.n_slots = 2;
    c.rl.replicates_per_config = 1;
    c.rl.ppo.n_steps = 16;
    c.rl.ppo.batch_size = 8;
    c.rl.ppo.hidden_units = 8;
    c.rl.total_steps = 32;
    c.robustness.multipliers = {0.0, 1.0};
    c.robustness.eval_runs = 10;
    c.sequence = {default_sequence(6, 3)[0], default_sequence(6, 3)[2]};
    config_ = (dir_ / "tiny.json").string();
    std::ofstream(config_) << serialize_config(c);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CommonOptions opts(const std::string& out) const {
    CommonOptions o;
    o.config_path = config_;
    o.out = (dir_ / out).string();
    return o;
  }

  fs::path dir_;
  std::string config_;
};

TEST_F(CommandsTest, GenDataIsDeterministicAndCountsGroups) {
  std::ostringstream log;
  gen_data(opts("a.csv"), log);
  gen_data(opts("b.csv"), log);
  EXPECT_EQ(slurp(dir_ / "a.csv"), slurp(dir_ / "b.csv"));
  CommonOptions o = opts("c.csv");
  o.seed = 77;
  gen_data(o, log);
  EXPECT_NE(slurp(dir_ / "a.csv"), slurp(dir_ / "c.csv"));
  std::ifstream in(dir_ / "a.csv");
  EXPECT_EQ(dynamics::read_csv(in).trajectories.size(), 6u);
}

TEST_F(CommandsTest, FitIsInvariantToRowOrder) {
  std::ostringstream log;
  gen_data(opts("data.csv"), log);
  const double f1 = fit(opts("model.json"), (dir_ / "data.csv").string(), log);
  EXPECT_EQ(f1, 1.0);

  std::ifstream in(dir_ / "data.csv");
  std::string header, line;
  std::getline(in, header);
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  std::mt19937_64 rng(3);
  std::shuffle(rows.begin(), rows.end(), rng);
  {
    std::ofstream out(dir_ / "shuffled.csv");
    out << header << "\n";
    for (const auto& r : rows) out << r << "\n";
  }
  EXPECT_EQ(fit(opts("model2.json"), (dir_ / "shuffled.csv").string(), log), f1);
  EXPECT_EQ(slurp(dir_ / "model.json"), slurp(dir_ / "model2.json"));
}

TEST_F(CommandsTest, TrainRobustnessReportPipeline) {
  std::ostringstream log;
  train(opts("run/speed"), "speed", log);
  for (const char* f : {"checkpoint.json", "training_log.csv", "sequence.csv", "evaluation.csv",
                        "utilization.csv", "model.json"})
    EXPECT_TRUE(fs::exists(dir_ / "run/speed" / f)) << f;
  const std::string first = slurp(dir_ / "run/speed/checkpoint.json");
  train(opts("run/speed"), "speed", log);
  EXPECT_EQ(slurp(dir_ / "run/speed/checkpoint.json"), first);

  const auto rows = robustness(opts("run/speed/robustness.csv"),
                               (dir_ / "run/speed/checkpoint.json").string(),
                               (dir_ / "run/speed/model.json").string(), "", log);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].runs, 10);

  std::ifstream seq_in(dir_ / "run/speed/sequence.csv");
  EXPECT_EQ(read_sequence_csv(seq_in).size(), 2u);

  const std::string a = report(opts("rep1"), (dir_ / "run").string(), log);
  const std::string b = report(opts("rep2"), (dir_ / "run").string(), log);
  EXPECT_EQ(a, b);
  EXPECT_EQ(slurp(dir_ / "rep1/summary.csv"), slurp(dir_ / "rep2/summary.csv"));
  EXPECT_NE(a.find("speed"), std::string::npos);
}

TEST_F(CommandsTest, ReportOnEmptyDirectoryListsMissingFiles) {
  fs::create_directories(dir_ / "empty");
  std::ostringstream log, err;
  try {
    report(opts("rep"), (dir_ / "empty").string(), log);
    FAIL() << "expected missing artifacts";
  } catch (...) {
    EXPECT_EQ(exit_code_for_current_exception(err), kInvalid);
  }
  EXPECT_NE(err.str().find("training_log.csv"), std::string::npos);
}

TEST_F(CommandsTest, ReportFlagsIncompleteScenario) {
  fs::create_directories(dir_ / "run/fuel");
  std::ofstream(dir_ / "run/fuel/training_log.csv") << "update\n";
  std::ostringstream log;
  EXPECT_THROW(report(opts("rep"), (dir_ / "run").string(), log), MissingArtifacts);
}

TEST(ExitCodes, FollowTheContract) {
  std::ostringstream err;
  auto code = [&](auto thrower) {
    try {
      thrower();
    } catch (...) {
      return exit_code_for_current_exception(err);
    }
    return -1;
  };
  EXPECT_EQ(code([] { throw ValidationError("x"); }), kInvalid);
  EXPECT_EQ(code([] { throw NumericalError("x"); }), kNumerical);
  EXPECT_EQ(code([] { throw NotFoundError("x"); }), kMissingArtifact);
  EXPECT_EQ(code([] { throw StateError("x"); }), kFailure);
}

TEST(Commands, InvalidConfigIsRejected) {
  CommonOptions o;
  o.config_path = "/nonexistent.json";
  EXPECT_THROW(resolve_config(o), NotFoundError);
  o.config_path.clear();
  o.jobs = 0;
  EXPECT_THROW(resolve_config(o), ValidationError);
}

}  // namespace
}  // namespace inertid::harness
