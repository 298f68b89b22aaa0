#pragma once

#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json_fwd.hpp>

namespace shoprl {

enum class ActionKind { kClick, kInput, kTerminate };

std::string_view to_string(ActionKind kind);

// A user action. Terminate carries no attributes, Click carries a target
// element name and Input carries the element name plus the typed text.
class Action {
 public:
  static Action click(std::string element_name);
  static Action input(std::string element_name, std::string text);
  static Action terminate();

  ActionKind kind() const { return kind_; }
  bool is_click() const { return kind_ == ActionKind::kClick; }
  bool is_input() const { return kind_ == ActionKind::kInput; }
  bool is_terminate() const { return kind_ == ActionKind::kTerminate; }

  // Empty for Terminate.
  const std::string& element_name() const { return element_name_; }
  // Empty unless Input.
  const std::string& text() const { return text_; }

  friend bool operator==(const Action&, const Action&) = default;

 private:
  Action(ActionKind kind, std::string element_name, std::string text)
      : kind_(kind), element_name_(std::move(element_name)), text_(std::move(text)) {}

  ActionKind kind_;
  std::string element_name_;
  std::string text_;
};

// {"type": "click", "name": ...} etc. Throws std::invalid_argument on schema errors.
nlohmann::json action_to_json(const Action& action);
Action action_from_json(const nlohmann::json& j);

// Unvalidated text produced by a model.
struct RawModelOutput {
  std::string text;
};

struct ParsedOutput {
  std::string rationale;
  Action action;
};

enum class FormatError { kNotJson, kMultipleObjects, kMissingField, kUnknownType, kBadAttributes };

std::string_view to_string(FormatError error);

struct FormatViolation {
  FormatError reason;
  std::string detail;
};

using ParseResult = std::variant<ParsedOutput, FormatViolation>;

// Accepts exactly one JSON object {"rationale": <string>, "action": {...}}
// whose action attributes match the action type exactly. Surrounding
// whitespace is tolerated; any other surrounding text is a violation.
ParseResult parse_action_output(const RawModelOutput& raw);

// Compact JSON with the rationale before the action.
std::string serialize_action_output(std::string_view rationale, const Action& action);

}  // namespace shoprl
