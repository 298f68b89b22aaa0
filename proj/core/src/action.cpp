#include "shoprl/action.hpp"

#include <cctype>
#include <optional>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace shoprl {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Length of the leading balanced {...} value, honoring string literals.
std::optional<std::size_t> leading_object_length(std::string_view s) {
  if (s.empty() || s.front() != '{') return std::nullopt;
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{' || c == '[') {
      ++depth;
    } else if (c == '}' || c == ']') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::nullopt;
}

FormatViolation violation(FormatError reason, std::string detail) {
  return FormatViolation{reason, std::move(detail)};
}

std::optional<FormatViolation> check_keys(const nlohmann::json& obj,
                                          std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) return violation(FormatError::kBadAttributes, "unexpected attribute '" + key + "'");
  }
  return std::nullopt;
}

std::optional<FormatViolation> require_name(const nlohmann::json& obj) {
  if (!obj.contains("name")) return violation(FormatError::kMissingField, "action.name missing");
  if (!obj["name"].is_string() || obj["name"].get_ref<const std::string&>().empty()) {
    return violation(FormatError::kBadAttributes, "action.name must be a non-empty string");
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::kClick: return "click";
    case ActionKind::kInput: return "input";
    case ActionKind::kTerminate: return "terminate";
  }
  return "unknown";
}

std::string_view to_string(FormatError error) {
  switch (error) {
    case FormatError::kNotJson: return "not-json";
    case FormatError::kMultipleObjects: return "multiple-objects";
    case FormatError::kMissingField: return "missing-field";
    case FormatError::kUnknownType: return "unknown-type";
    case FormatError::kBadAttributes: return "bad-attributes";
  }
  return "unknown";
}

Action Action::click(std::string element_name) {
  if (element_name.empty()) throw std::invalid_argument("click requires a non-empty element name");
  return Action(ActionKind::kClick, std::move(element_name), {});
}

Action Action::input(std::string element_name, std::string text) {
  if (element_name.empty()) throw std::invalid_argument("input requires a non-empty element name");
  return Action(ActionKind::kInput, std::move(element_name), std::move(text));
}

Action Action::terminate() { return Action(ActionKind::kTerminate, {}, {}); }

nlohmann::json action_to_json(const Action& action) {
  nlohmann::json j;
  j["type"] = std::string(to_string(action.kind()));
  if (!action.is_terminate()) j["name"] = action.element_name();
  if (action.is_input()) j["text"] = action.text();
  return j;
}

Action action_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("action must be an object");
  const auto type = j.at("type").get<std::string>();
  if (type == "click") {
    return Action::click(j.at("name").get<std::string>());
  }
  if (type == "input") {
    return Action::input(j.at("name").get<std::string>(), j.at("text").get<std::string>());
  }
  if (type == "terminate") return Action::terminate();
  throw std::invalid_argument("unknown action type '" + type + "'");
}

ParseResult parse_action_output(const RawModelOutput& raw) {
  const std::string_view text = trim(raw.text);
  const auto length = leading_object_length(text);
  if (!length) return violation(FormatError::kNotJson, "output does not start with a JSON object");

  nlohmann::json root = nlohmann::json::parse(text.substr(0, *length), nullptr, false);
  if (root.is_discarded() || !root.is_object()) {
    return violation(FormatError::kNotJson, "leading object is not valid JSON");
  }
  const std::string_view rest = trim(text.substr(*length));
  if (!rest.empty()) {
    if (!nlohmann::json::accept(rest) && !leading_object_length(rest)) {
      return violation(FormatError::kNotJson, "trailing text after JSON object");
    }
    return violation(FormatError::kMultipleObjects, "more than one JSON value in output");
  }

  if (!root.contains("rationale")) return violation(FormatError::kMissingField, "rationale missing");
  if (!root.contains("action")) return violation(FormatError::kMissingField, "action missing");
  if (auto v = check_keys(root, {"rationale", "action"})) return *v;
  if (!root["rationale"].is_string()) {
    return violation(FormatError::kBadAttributes, "rationale must be a string");
  }
  const auto& act = root["action"];
  if (!act.is_object()) return violation(FormatError::kBadAttributes, "action must be an object");
  if (!act.contains("type")) return violation(FormatError::kMissingField, "action.type missing");
  if (!act["type"].is_string()) {
    return violation(FormatError::kUnknownType, "action.type must be a string");
  }
  const auto& type = act["type"].get_ref<const std::string&>();
  auto rationale = root["rationale"].get<std::string>();

  if (type == "terminate") {
    if (auto v = check_keys(act, {"type"})) return *v;
    return ParsedOutput{std::move(rationale), Action::terminate()};
  }
  if (type == "click") {
    if (auto v = require_name(act)) return *v;
    if (auto v = check_keys(act, {"type", "name"})) return *v;
    return ParsedOutput{std::move(rationale), Action::click(act["name"].get<std::string>())};
  }
  if (type == "input") {
    if (auto v = require_name(act)) return *v;
    if (!act.contains("text")) return violation(FormatError::kMissingField, "action.text missing");
    if (!act["text"].is_string()) {
      return violation(FormatError::kBadAttributes, "action.text must be a string");
    }
    if (auto v = check_keys(act, {"type", "name", "text"})) return *v;
    return ParsedOutput{std::move(rationale), Action::input(act["name"].get<std::string>(),
                                                            act["text"].get<std::string>())};
  }
  return violation(FormatError::kUnknownType, "unknown action type '" + type + "'");
}

std::string serialize_action_output(std::string_view rationale, const Action& action) {
  // ordered_json keeps "rationale" ahead of "action" in the emitted text.
  nlohmann::ordered_json out;
  out["rationale"] = std::string(rationale);
  nlohmann::ordered_json act;
  act["type"] = std::string(to_string(action.kind()));
  if (!action.is_terminate()) act["name"] = action.element_name();
  if (action.is_input()) act["text"] = action.text();
  out["action"] = std::move(act);
  return out.dump();
}

}  // namespace shoprl
