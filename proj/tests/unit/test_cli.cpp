#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "run_config.hpp"
#include "shoprl/generator.hpp"
#include "shoprl/reward.hpp"

namespace shoprl::app {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("shoprl_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path config(const std::string& name, const nlohmann::json& j) {
    const auto path = dir_ / (name + ".json");
    std::ofstream(path) << j.dump(2);
    return path;
  }

  static nlohmann::json small(nlohmann::json extra = nlohmann::json::object()) {
    nlohmann::json j = {{"seed", 3},
                        {"generator", {{"n_users", 6}, {"n_sessions", 24}}},
                        {"train", {{"mode", "sft"}, {"sft", {{"epochs", 2}}}}}};
    j.merge_patch(extra);
    return j;
  }

  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).generic_string()] = slurp(e.path());
  }
  return out;
}

TEST_F(Cli, TrainWritesOutputs) {
  ASSERT_EQ(run_command("train", config("c", small()), dir_ / "out", std::nullopt), kExitOk);
  for (const char* f : {"checkpoint.json", "config.json", "metrics.csv", "epochs.csv", "report.json",
                        "per_type.csv", "distribution.csv", "predictions.jsonl"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  }
  // The effective config reloads to the same configuration.
  const auto reloaded = load_run_config(dir_ / "out" / "config.json");
  EXPECT_EQ(reloaded.hash(), load_run_config(config("c", small())).hash());
  EXPECT_FALSE(reloaded.dataset.has_value());
  EXPECT_FALSE(reloaded.init_checkpoint.has_value());
  // Training again from the written config reproduces the run.
  ASSERT_EQ(run_command("train", dir_ / "out" / "config.json", dir_ / "again", std::nullopt), kExitOk);
  EXPECT_EQ(slurp(dir_ / "again" / "report.json"), slurp(dir_ / "out" / "report.json"));
}

TEST_F(Cli, RerunsAreByteIdentical) {
  const auto c = config("c", small());
  ASSERT_EQ(run_command("gen-data", c, dir_ / "a" / "data", std::nullopt), kExitOk);
  ASSERT_EQ(run_command("gen-data", c, dir_ / "b" / "data", std::nullopt), kExitOk);
  ASSERT_EQ(run_command("train", c, dir_ / "a" / "train", std::nullopt), kExitOk);
  ASSERT_EQ(run_command("train", c, dir_ / "b" / "train", std::nullopt), kExitOk);
  EXPECT_EQ(tree(dir_ / "a"), tree(dir_ / "b"));
  ASSERT_EQ(run_command("gen-data", c, dir_ / "c", 4), kExitOk);
  EXPECT_NE(slurp(dir_ / "c" / "sessions.jsonl"), slurp(dir_ / "a" / "data" / "sessions.jsonl"));
}

TEST_F(Cli, TrainsFromExportedDataset) {
  const auto c = config("c", small());
  ASSERT_EQ(run_command("gen-data", c, dir_ / "data", std::nullopt), kExitOk);
  ASSERT_EQ(run_command("train", config("d", small({{"dataset", (dir_ / "data").string()}})), dir_ / "from_disk",
                        std::nullopt),
            kExitOk);
  ASSERT_EQ(run_command("train", c, dir_ / "in_memory", std::nullopt), kExitOk);
  EXPECT_EQ(slurp(dir_ / "from_disk" / "report.json"), slurp(dir_ / "in_memory" / "report.json"));
}

TEST_F(Cli, ZeroShotWritesNoCheckpoint) {
  ASSERT_EQ(run_command("train", config("c", small({{"train", {{"mode", "zero_shot"}}}})), dir_ / "out",
                        std::nullopt),
            kExitOk);
  EXPECT_FALSE(fs::exists(dir_ / "out" / "checkpoint.json"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "report.json"));
}

TEST_F(Cli, EvalOfCheckpointMatchesTrainReport) {
  ASSERT_EQ(run_command("train", config("c", small()), dir_ / "train", std::nullopt), kExitOk);
  const auto e = config("e", small({{"eval", {{"checkpoint", (dir_ / "train" / "checkpoint.json").string()}}}}));
  ASSERT_EQ(run_command("eval", e, dir_ / "eval", std::nullopt), kExitOk);
  EXPECT_EQ(slurp(dir_ / "eval" / "report.json"), slurp(dir_ / "train" / "report.json"));
  EXPECT_EQ(slurp(dir_ / "eval" / "predictions.jsonl"), slurp(dir_ / "train" / "predictions.jsonl"));
}

TEST_F(Cli, PerfectPredictionsScoreOne) {
  const auto cfg = parse_run_config(small());
  const auto dataset = generate_dataset(cfg.generator);
  const auto preds = dir_ / "preds.jsonl";
  {
    std::ofstream os(preds);
    for (const auto& s : dataset.sessions) {
      for (std::size_t t = 0; t < s.steps.size(); ++t) {
        os << nlohmann::json{{"session_id", s.session_id},
                             {"step_index", t},
                             {"output", serialize_action_output("because", s.steps[t].action)}}
                  .dump()
           << "\n";
      }
    }
  }
  ASSERT_EQ(run_command("eval", config("e", small({{"eval", {{"predictions", preds.string()}}}})), dir_ / "out",
                        std::nullopt),
            kExitOk);
  const auto report = nlohmann::json::parse(slurp(dir_ / "out" / "report.json"));
  EXPECT_EQ(report["next_action_accuracy"].get<double>(), 1.0);
  EXPECT_EQ(report["action_type_macro_f1"].get<double>(), 1.0);
  EXPECT_EQ(report["fine_grained_accuracy"].get<double>(), 1.0);
  EXPECT_EQ(report["session_outcome_weighted_f1"].get<double>(), 1.0);
  EXPECT_EQ(report["num_records"].get<std::size_t>(), dataset.num_steps());
}

TEST_F(Cli, ConfigProblemsExitWithTwo) {
  EXPECT_EQ(run_command("train", dir_ / "missing.json", dir_ / "out", std::nullopt), kExitConfig);
  EXPECT_EQ(run_command("train", config("a", small({{"bogus", 1}})), dir_ / "out", std::nullopt), kExitConfig);
  EXPECT_EQ(run_command("train", config("b", small({{"train", {{"mode", "ppo"}}}})), dir_ / "out", std::nullopt),
            kExitConfig);
  EXPECT_EQ(run_command("train", config("c", small({{"train", {{"grpo", {{"group_size", 1}}}}}})), dir_ / "out",
                        std::nullopt),
            kExitConfig);
  EXPECT_EQ(run_command("train", config("d", small({{"generator", {{"n_sessions", 0}}}})), dir_ / "out",
                        std::nullopt),
            kExitConfig);
  EXPECT_EQ(run_command("eval", config("e", small()), dir_ / "out", std::nullopt), kExitConfig);
  EXPECT_EQ(run_command("fly", config("f", small()), dir_ / "out", std::nullopt), kExitConfig);
  std::ofstream(dir_ / "broken.json") << "{ not json";
  EXPECT_EQ(run_command("train", dir_ / "broken.json", dir_ / "out", std::nullopt), kExitConfig);
}

TEST_F(Cli, RuntimeProblemsExitWithOne) {
  const auto e = config("e", small({{"eval", {{"checkpoint", (dir_ / "nope.json").string()}}}}));
  EXPECT_EQ(run_command("eval", e, dir_ / "out", std::nullopt), kExitRuntime);
  std::ofstream(dir_ / "bad_preds.jsonl") << "{\"session_id\": \"nobody\", \"step_index\": 0, \"output\": \"\"}\n";
  const auto p = config("p", small({{"eval", {{"predictions", (dir_ / "bad_preds.jsonl").string()}}}}));
  EXPECT_EQ(run_command("eval", p, dir_ / "out", std::nullopt), kExitRuntime);
  EXPECT_EQ(run_command("train", config("d", small({{"dataset", (dir_ / "no_such_dir").string()}})), dir_ / "out",
                        std::nullopt),
            kExitRuntime);
}

TEST_F(Cli, CheckpointLayoutMismatchIsAConfigError) {
  ASSERT_EQ(run_command("train", config("c", small()), dir_ / "train", std::nullopt), kExitOk);
  const auto e = config("e", small({{"features", {{"dim", 64}}},
                                    {"eval", {{"checkpoint", (dir_ / "train" / "checkpoint.json").string()}}}}));
  EXPECT_EQ(run_command("eval", e, dir_ / "eval", std::nullopt), kExitConfig);
}

TEST_F(Cli, RlRegimeDefaultsToRlOnlyReward) {
  EXPECT_EQ(parse_run_config(small({{"train", {{"mode", "rl"}}}})).train.reward.incorrect_click_penalty, 0.0);
  EXPECT_EQ(parse_run_config(small()).train.reward.incorrect_click_penalty, -1.0);
  EXPECT_FALSE(parse_run_config(small()).explicit_reward);
}

TEST_F(Cli, AblateWritesTable) {
  const auto c = config("c", small({{"ablate", {{"modes", {"full", "no_persona"}}, {"regimes", {"sft"}}}}}));
  ASSERT_EQ(run_command("ablate", c, dir_ / "out", std::nullopt), kExitOk);
  const auto table = slurp(dir_ / "out" / "ablation.csv");
  EXPECT_NE(table.find("full,sft,"), std::string::npos);
  EXPECT_NE(table.find("no_persona,sft,"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "no_persona" / "sft" / "checkpoint.json"));
}

}  // namespace
}  // namespace shoprl::app
