#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shoprl/ablation.hpp"
#include "shoprl/context.hpp"
#include "shoprl/examples.hpp"
#include "shoprl/features.hpp"
#include "shoprl/generator.hpp"
#include "shoprl/trainer.hpp"

namespace shoprl::app {

// Any problem with the configuration itself; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EvalProtocol { kTeacherForced, kFreeRunning };

struct EvalOptions {
  std::optional<std::filesystem::path> checkpoint;
  std::optional<std::filesystem::path> predictions;
  EvalProtocol protocol = EvalProtocol::kTeacherForced;
  Split split = Split::kEval;
};

struct AblateOptions {
  std::vector<AblationMode> modes = {AblationMode::kFull, AblationMode::kNoPersona,
                                     AblationMode::kShufflePersona, AblationMode::kNoRationale};
  std::vector<TrainMode> regimes = {TrainMode::kSftOnly, TrainMode::kSftThenRl};
};

struct RunConfig {
  std::uint64_t seed = 0;
  GeneratorSpec generator;
  // Dataset directory with sessions.jsonl and personas.jsonl; when absent the
  // corpus is generated in memory from `generator`.
  std::optional<std::filesystem::path> dataset;
  TokenBudget budget{TokenBudget::kSmall};
  double eval_fraction = 0.2;
  FeatureConfig features;
  AblationMode ablation = AblationMode::kFull;
  TrainConfig train;
  // False when train.reward was left to the mode's preset.
  bool explicit_reward = false;
  std::optional<std::filesystem::path> init_checkpoint;
  EvalOptions eval;
  AblateOptions ablate;

  // Canonical JSON of the effective configuration.
  nlohmann::ordered_json to_json() const;
  std::string hash() const;
};

// rl_only_v1 for RL from scratch, sft_rl_v1 otherwise.
RewardSpec default_reward(TrainMode mode);

// Validates everything up front; unknown keys are rejected. A seed override
// replaces the top-level seed, which also seeds the generator unless the
// generator section sets its own.
RunConfig parse_run_config(const nlohmann::json& j, std::optional<std::uint64_t> seed_override = {});
RunConfig load_run_config(const std::filesystem::path& path,
                          std::optional<std::uint64_t> seed_override = {});

}  // namespace shoprl::app
