#pragma once

#include <array>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "shoprl/action.hpp"
#include "shoprl/click_subtype.hpp"

namespace shoprl {

enum class RewardMode { kSftRl, kRlOnly };

std::string_view to_string(RewardMode mode);

// Difficulty weights and penalties for the verifiable reward.
struct RewardSpec {
  RewardMode mode = RewardMode::kSftRl;
  std::array<double, kNumClickSubtypes> click_weights{};  // indexed by ClickSubtype
  double input_weight = 0.0;
  double terminate_weight = 0.0;
  double incorrect_click_penalty = 0.0;
  double format_reward_value = 1.0;

  static RewardSpec sft_rl_v1();
  static RewardSpec rl_only_v1();
  // "sft_rl_v1" or "rl_only_v1"; throws std::invalid_argument otherwise.
  static RewardSpec preset(std::string_view name);

  // Either {"preset": name, ...overrides} or a full table. Unknown keys throw.
  static RewardSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  double weight_for(const Action& action,
                    const SubtypeRuleTable& rules = SubtypeRuleTable::defaults()) const;
};

struct RewardBreakdown {
  int r_action = 0;
  double weight = 0.0;
  int r_format = 0;
  double total = 0.0;
};

// 1 iff kinds match and all required attributes match. Element names are
// compared exactly; input text after trimming and ASCII case-folding.
int action_reward(const Action& pred, const Action& gold);

// 1 iff the output parses under the action output contract.
int format_reward(const RawModelOutput& raw);

// Correctness-gated weight plus format reward; wrong clicks take the
// incorrect-click penalty instead of the weight. Unparseable output scores 0.
RewardBreakdown total_reward(const RawModelOutput& raw, const Action& gold, const RewardSpec& spec,
                             const SubtypeRuleTable& rules = SubtypeRuleTable::defaults());

}  // namespace shoprl
