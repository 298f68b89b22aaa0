#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "shoprl/action.hpp"
#include "shoprl/click_subtype.hpp"

namespace shoprl {

// One scored prediction.
struct EvalRecord {
  Action gold = Action::terminate();
  RawModelOutput raw_pred;
  std::variant<Action, FormatViolation> parsed_pred = Action::terminate();
  std::string session_id;
  std::size_t step_index = 0;
  bool is_terminal_step = false;

  // Parses raw output into parsed_pred.
  static EvalRecord from_raw(Action gold, RawModelOutput raw, std::string session_id,
                             std::size_t step_index, bool is_terminal_step);
  const Action* pred_action() const { return std::get_if<Action>(&parsed_pred); }
};

// Coarse predicted class; kOther covers unparseable output.
enum class TypeClass { kClick, kInput, kTerminate, kOther };
inline constexpr std::array<TypeClass, 4> kAllTypeClasses = {TypeClass::kClick, TypeClass::kInput,
                                                             TypeClass::kTerminate, TypeClass::kOther};
std::string_view to_string(TypeClass c);
TypeClass type_class(const Action& action);
TypeClass predicted_type_class(const EvalRecord& record);

double next_action_accuracy(std::span<const EvalRecord> records);
double action_type_macro_f1(std::span<const EvalRecord> records);
double fine_grained_accuracy(std::span<const EvalRecord> records,
                             const SubtypeRuleTable& rules = SubtypeRuleTable::defaults());
double session_outcome_weighted_f1(std::span<const EvalRecord> records,
                                   const SubtypeRuleTable& rules = SubtypeRuleTable::defaults());

struct CountRow {
  std::string type;
  std::size_t gold_count = 0;
  std::size_t pred_count = 0;
  std::size_t correct_count = 0;
  double accuracy() const {
    return gold_count == 0 ? 0.0 : static_cast<double>(correct_count) / static_cast<double>(gold_count);
  }
};

// Fine-grained labels: "click/<subtype>" for the 13 subtypes, then "input",
// "terminate" and "other" (unparseable predictions). A prediction counts as
// correct when it exactly matches the gold action.
std::vector<CountRow> distribution_report(std::span<const EvalRecord> records,
                                          const SubtypeRuleTable& rules = SubtypeRuleTable::defaults());

// Rows for click/input/terminate/other; correct means the type matched.
std::vector<CountRow> per_type_table(std::span<const EvalRecord> records);

struct MetricsReport {
  double next_action_accuracy = 0.0;
  double action_type_macro_f1 = 0.0;
  double fine_grained_accuracy = 0.0;
  double session_outcome_weighted_f1 = 0.0;
  std::vector<CountRow> per_type_table;
  std::size_t num_records = 0;
  std::size_t num_sessions = 0;

  nlohmann::ordered_json to_json() const;
};

MetricsReport compute_report(std::span<const EvalRecord> records,
                             const SubtypeRuleTable& rules = SubtypeRuleTable::defaults());

// CSV with header type,gold,pred,correct[,accuracy].
void write_count_csv(std::ostream& os, std::span<const CountRow> rows, bool with_accuracy);

}  // namespace shoprl
