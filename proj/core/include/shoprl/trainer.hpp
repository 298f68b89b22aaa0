#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shoprl/examples.hpp"
#include "shoprl/policy.hpp"
#include "shoprl/reward.hpp"

namespace shoprl {

class StaleRollout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SftConfig {
  std::size_t epochs = 60;
  double learning_rate = 5.0;
  std::size_t batch_size = 64;

  void validate() const;
  static SftConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct GrpoConfig {
  std::size_t group_size = 8;
  double clip_epsilon = 0.2;
  double kl_coef = 0.01;
  double adv_delta = 1e-6;
  double learning_rate = 0.05;
  std::size_t batch_size = 64;
  std::size_t epochs = 2;
  double temperature = 1.0;
  // Gradient steps taken on each batch of rollouts before pi_old is refreshed.
  std::size_t inner_updates = 2;
  // Re-snapshot pi_ref from the current params every this many epochs; 0 keeps
  // the snapshot taken at RL start.
  std::size_t ref_refresh_epochs = 0;

  void validate() const;
  static GrpoConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct LossAndGrad {
  double loss = 0.0;
  PolicyParams grad;
};

// Token-averaged negative log-likelihood of the gold sequence.
LossAndGrad sft_loss(const Policy& policy, const PolicyParams& params, const PromptFeatures& feats,
                     const ActionTokenSeq& gold);

// (R_i - mean) / (population std + delta); all zeros when the group has no spread.
std::vector<double> group_advantages(std::span<const double> rewards, double delta);

struct RolloutSample {
  ActionTokenSeq seq;
  std::vector<double> old_log_probs;
  double reward = 0.0;
};

struct RolloutGroup {
  std::vector<RolloutSample> samples;
  std::vector<double> advantages;
  std::uint64_t params_old_hash = 0;
};

// Samples G outputs from params_old, scores them through the serialized
// output path and attaches group advantages.
RolloutGroup collect_rollouts(const Policy& policy, const PolicyParams& params_old,
                              const TrainingExample& example, const RewardSpec& reward,
                              const GrpoConfig& config, std::uint64_t seed);

struct GrpoLoss {
  double loss = 0.0;       // -(surrogate - beta * kl)
  double surrogate = 0.0;
  double kl = 0.0;
  double clip_fraction = 0.0;  // share of tokens whose gradient is cut by clipping
  std::size_t tokens = 0;
  PolicyParams grad;
};

// Clipped group-relative surrogate with an exact per-token KL penalty
// against the reference policy. Throws StaleRollout when the group was not
// produced by params_old.
GrpoLoss grpo_loss(const Policy& policy, const PolicyParams& params,
                   const PolicyParams& params_old, const PolicyParams& params_ref,
                   const PromptFeatures& feats, const RolloutGroup& group,
                   const GrpoConfig& config);

enum class TrainMode { kZeroShot, kSftOnly, kRlOnly, kSftThenRl };

std::string_view to_string(TrainMode mode);
TrainMode train_mode_from_string(std::string_view name);

struct TrainConfig {
  TrainMode mode = TrainMode::kSftThenRl;
  SftConfig sft;
  GrpoConfig grpo;
  RewardSpec reward = RewardSpec::sft_rl_v1();
  double init_scale = 0.01;
  std::uint64_t seed = 0;
};

struct MetricsRow {
  std::string phase;  // "sft" or "rl"
  std::size_t epoch = 0;
  std::size_t batch = 0;
  std::optional<double> mean_reward;
  double loss = 0.0;
  std::optional<double> kl;
  std::optional<double> clip_fraction;
};

struct TrainResult {
  PolicyParams params;
  std::vector<MetricsRow> log;
};

using ProgressFn = std::function<void(const MetricsRow&)>;
// Called after every epoch of each phase with the current params.
using EpochFn = std::function<void(std::string_view phase, std::size_t epoch, const PolicyParams&)>;

// Raised when the exact KL of a batch comes out negative.
class NegativeKl : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Runs the phases selected by config.mode. When `init` is given it replaces
// random initialization and, for kSftThenRl, the SFT phase is skipped.
TrainResult train(const Policy& policy, std::span<const TrainingExample> examples,
                  const TrainConfig& config, std::optional<PolicyParams> init = std::nullopt,
                  const ProgressFn& progress = {}, const EpochFn& on_epoch = {});

}  // namespace shoprl
