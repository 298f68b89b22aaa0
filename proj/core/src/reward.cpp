#include "shoprl/reward.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace shoprl {

namespace {

std::string normalize_text(std::string_view s) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(RewardMode mode) {
  return mode == RewardMode::kSftRl ? "sft_rl" : "rl_only";
}

RewardSpec RewardSpec::sft_rl_v1() {
  RewardSpec spec;
  spec.mode = RewardMode::kSftRl;
  spec.click_weights.fill(1000.0);
  spec.click_weights[index_of(ClickSubtype::kProductOption)] = 10.0;
  spec.click_weights[index_of(ClickSubtype::kReview)] = 1.0;
  spec.click_weights[index_of(ClickSubtype::kSearch)] = 1.0;
  spec.input_weight = 2000.0;
  spec.terminate_weight = 1.0;
  spec.incorrect_click_penalty = -1.0;
  spec.format_reward_value = 1.0;
  return spec;
}

RewardSpec RewardSpec::rl_only_v1() {
  RewardSpec spec = sft_rl_v1();
  spec.mode = RewardMode::kRlOnly;
  spec.incorrect_click_penalty = 0.0;
  return spec;
}

RewardSpec RewardSpec::preset(std::string_view name) {
  if (name == "sft_rl_v1") return sft_rl_v1();
  if (name == "rl_only_v1") return rl_only_v1();
  throw std::invalid_argument("unknown reward preset '" + std::string(name) + "'");
}

RewardSpec RewardSpec::from_json(const nlohmann::json& j) {
  if (j.is_string()) return preset(j.get<std::string>());
  if (!j.is_object()) throw std::invalid_argument("reward spec must be a preset name or object");
  RewardSpec spec = j.contains("preset") ? preset(j["preset"].get<std::string>()) : sft_rl_v1();
  for (const auto& [key, value] : j.items()) {
    if (key == "preset") continue;
    if (key == "mode") {
      const auto m = value.get<std::string>();
      if (m == "sft_rl") {
        spec.mode = RewardMode::kSftRl;
      } else if (m == "rl_only") {
        spec.mode = RewardMode::kRlOnly;
      } else {
        throw std::invalid_argument("unknown reward mode '" + m + "'");
      }
    } else if (key == "input_weight") {
      spec.input_weight = value.get<double>();
    } else if (key == "terminate_weight") {
      spec.terminate_weight = value.get<double>();
    } else if (key == "incorrect_click_penalty") {
      spec.incorrect_click_penalty = value.get<double>();
    } else if (key == "format_reward_value") {
      spec.format_reward_value = value.get<double>();
    } else if (key == "click_weights") {
      for (const auto& [name, w] : value.items()) {
        const auto subtype = click_subtype_from_string(name);
        if (!subtype) throw std::invalid_argument("unknown click subtype '" + name + "'");
        spec.click_weights[index_of(*subtype)] = w.get<double>();
      }
    } else {
      throw std::invalid_argument("unknown reward spec key '" + key + "'");
    }
  }
  return spec;
}

nlohmann::json RewardSpec::to_json() const {
  nlohmann::json weights;
  for (auto subtype : kAllClickSubtypes) {
    weights[std::string(shoprl::to_string(subtype))] = click_weights[index_of(subtype)];
  }
  return {{"mode", std::string(shoprl::to_string(mode))},
          {"click_weights", weights},
          {"input_weight", input_weight},
          {"terminate_weight", terminate_weight},
          {"incorrect_click_penalty", incorrect_click_penalty},
          {"format_reward_value", format_reward_value}};
}

double RewardSpec::weight_for(const Action& action, const SubtypeRuleTable& rules) const {
  switch (action.kind()) {
    case ActionKind::kInput: return input_weight;
    case ActionKind::kTerminate: return terminate_weight;
    case ActionKind::kClick: return click_weights[index_of(rules.classify(action.element_name()))];
  }
  return 0.0;
}

int action_reward(const Action& pred, const Action& gold) {
  if (pred.kind() != gold.kind()) return 0;
  switch (gold.kind()) {
    case ActionKind::kTerminate: return 1;
    case ActionKind::kClick: return pred.element_name() == gold.element_name() ? 1 : 0;
    case ActionKind::kInput:
      return pred.element_name() == gold.element_name() &&
                     normalize_text(pred.text()) == normalize_text(gold.text())
                 ? 1
                 : 0;
  }
  return 0;
}

int format_reward(const RawModelOutput& raw) {
  return std::holds_alternative<ParsedOutput>(parse_action_output(raw)) ? 1 : 0;
}

RewardBreakdown total_reward(const RawModelOutput& raw, const Action& gold, const RewardSpec& spec,
                             const SubtypeRuleTable& rules) {
  RewardBreakdown out;
  const ParseResult parsed = parse_action_output(raw);
  const auto* ok = std::get_if<ParsedOutput>(&parsed);
  if (ok == nullptr) return out;

  const Action& pred = ok->action;
  out.r_format = 1;
  out.r_action = action_reward(pred, gold);
  out.weight = spec.weight_for(pred, rules);
  const double format_part = spec.format_reward_value;
  if (out.r_action == 1) {
    out.total = out.weight + format_part;
  } else if (pred.is_click()) {
    out.total = spec.incorrect_click_penalty + format_part;
  } else {
    out.total = format_part;
  }
  return out;
}

}  // namespace shoprl
