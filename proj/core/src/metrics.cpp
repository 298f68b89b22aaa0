#include "shoprl/metrics.hpp"

#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>

#include "shoprl/reward.hpp"

namespace shoprl {
namespace {

void require_non_empty(std::span<const EvalRecord> records) {
  if (records.empty()) throw std::invalid_argument("metrics need at least one record");
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double f1(std::size_t tp, std::size_t pred, std::size_t gold) {
  return pred + gold == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(pred + gold);
}

enum class Outcome { kPurchase, kTerminate, kNeither };

Outcome outcome_of(const Action* a, const SubtypeRuleTable& rules) {
  if (a == nullptr) return Outcome::kNeither;
  if (a->is_terminate()) return Outcome::kTerminate;
  if (a->is_click() && rules.classify(a->element_name()) == ClickSubtype::kPurchase) {
    return Outcome::kPurchase;
  }
  return Outcome::kNeither;
}

std::string fine_label(const Action* a, const SubtypeRuleTable& rules) {
  if (a == nullptr) return "other";
  switch (a->kind()) {
    case ActionKind::kClick: return "click/" + std::string(to_string(rules.classify(a->element_name())));
    case ActionKind::kInput: return "input";
    case ActionKind::kTerminate: return "terminate";
  }
  return "other";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

EvalRecord EvalRecord::from_raw(Action gold, RawModelOutput raw, std::string session_id,
                                std::size_t step_index, bool is_terminal_step) {
  EvalRecord r;
  r.gold = std::move(gold);
  auto parsed = parse_action_output(raw);
  if (auto* ok = std::get_if<ParsedOutput>(&parsed)) {
    r.parsed_pred = ok->action;
  } else {
    r.parsed_pred = std::get<FormatViolation>(parsed);
  }
  r.raw_pred = std::move(raw);
  r.session_id = std::move(session_id);
  r.step_index = step_index;
  r.is_terminal_step = is_terminal_step;
  return r;
}

std::string_view to_string(TypeClass c) {
  switch (c) {
    case TypeClass::kClick: return "click";
    case TypeClass::kInput: return "input";
    case TypeClass::kTerminate: return "terminate";
    case TypeClass::kOther: return "other";
  }
  return "other";
}

TypeClass type_class(const Action& action) {
  switch (action.kind()) {
    case ActionKind::kClick: return TypeClass::kClick;
    case ActionKind::kInput: return TypeClass::kInput;
    case ActionKind::kTerminate: return TypeClass::kTerminate;
  }
  return TypeClass::kOther;
}

TypeClass predicted_type_class(const EvalRecord& record) {
  const Action* a = record.pred_action();
  return a == nullptr ? TypeClass::kOther : type_class(*a);
}

double next_action_accuracy(std::span<const EvalRecord> records) {
  require_non_empty(records);
  std::size_t hits = 0;
  for (const auto& r : records) {
    if (const Action* a = r.pred_action()) hits += static_cast<std::size_t>(action_reward(*a, r.gold));
  }
  return ratio(hits, records.size());
}

double action_type_macro_f1(std::span<const EvalRecord> records) {
  require_non_empty(records);
  std::array<std::size_t, 4> gold{}, pred{}, tp{};
  for (const auto& r : records) {
    const auto g = static_cast<std::size_t>(type_class(r.gold));
    const auto p = static_cast<std::size_t>(predicted_type_class(r));
    ++gold[g];
    ++pred[p];
    if (g == p) ++tp[g];
  }
  double sum = 0.0;
  std::size_t classes = 0;
  for (const auto c : {TypeClass::kClick, TypeClass::kInput, TypeClass::kTerminate}) {
    const auto i = static_cast<std::size_t>(c);
    if (gold[i] == 0 && pred[i] == 0) continue;
    sum += f1(tp[i], pred[i], gold[i]);
    ++classes;
  }
  return classes == 0 ? 0.0 : sum / static_cast<double>(classes);
}

double fine_grained_accuracy(std::span<const EvalRecord> records, const SubtypeRuleTable& rules) {
  require_non_empty(records);
  std::size_t hits = 0;
  for (const auto& r : records) {
    const Action* a = r.pred_action();
    if (a == nullptr || a->kind() != r.gold.kind()) continue;
    if (r.gold.is_click() &&
        rules.classify(a->element_name()) != rules.classify(r.gold.element_name())) {
      continue;
    }
    ++hits;
  }
  return ratio(hits, records.size());
}

double session_outcome_weighted_f1(std::span<const EvalRecord> records,
                                   const SubtypeRuleTable& rules) {
  require_non_empty(records);
  std::array<std::size_t, 3> gold{}, pred{}, tp{};
  std::size_t n = 0;
  for (const auto& r : records) {
    if (!r.is_terminal_step) continue;
    const Outcome g = outcome_of(&r.gold, rules);
    if (g == Outcome::kNeither) {
      throw std::invalid_argument("terminal gold action of session '" + r.session_id +
                                  "' is neither a purchase nor a terminate");
    }
    const Outcome p = outcome_of(r.pred_action(), rules);
    ++gold[static_cast<std::size_t>(g)];
    ++pred[static_cast<std::size_t>(p)];
    if (g == p) ++tp[static_cast<std::size_t>(g)];
    ++n;
  }
  if (n == 0) throw std::invalid_argument("records contain no terminal steps");
  double sum = 0.0;
  for (const auto g : {Outcome::kPurchase, Outcome::kTerminate}) {
    const auto i = static_cast<std::size_t>(g);
    if (gold[i] == 0) continue;
    sum += static_cast<double>(gold[i]) / static_cast<double>(n) * f1(tp[i], pred[i], gold[i]);
  }
  return sum;
}

std::vector<CountRow> distribution_report(std::span<const EvalRecord> records,
                                          const SubtypeRuleTable& rules) {
  require_non_empty(records);
  std::vector<CountRow> rows;
  std::map<std::string, std::size_t> index;
  auto add = [&](std::string label) {
    index.emplace(label, rows.size());
    rows.push_back({std::move(label), 0, 0, 0});
  };
  for (const auto s : kAllClickSubtypes) add("click/" + std::string(to_string(s)));
  add("input");
  add("terminate");
  add("other");
  for (const auto& r : records) {
    const Action* a = r.pred_action();
    auto& g = rows[index.at(fine_label(&r.gold, rules))];
    ++g.gold_count;
    ++rows[index.at(fine_label(a, rules))].pred_count;
    if (a != nullptr && action_reward(*a, r.gold) == 1) ++g.correct_count;
  }
  return rows;
}

std::vector<CountRow> per_type_table(std::span<const EvalRecord> records) {
  std::vector<CountRow> rows;
  for (const auto c : kAllTypeClasses) rows.push_back({std::string(to_string(c)), 0, 0, 0});
  for (const auto& r : records) {
    const auto g = static_cast<std::size_t>(type_class(r.gold));
    const auto p = static_cast<std::size_t>(predicted_type_class(r));
    ++rows[g].gold_count;
    ++rows[p].pred_count;
    if (g == p) ++rows[g].correct_count;
  }
  return rows;
}

nlohmann::ordered_json MetricsReport::to_json() const {
  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  for (const auto& row : per_type_table) {
    table.push_back({{"type", row.type},
                     {"gold", row.gold_count},
                     {"pred", row.pred_count},
                     {"correct", row.correct_count},
                     {"accuracy", row.accuracy()}});
  }
  nlohmann::ordered_json j = {{"next_action_accuracy", next_action_accuracy},
                              {"action_type_macro_f1", action_type_macro_f1},
                              {"fine_grained_accuracy", fine_grained_accuracy},
                              {"session_outcome_weighted_f1", session_outcome_weighted_f1},
                              {"num_records", num_records},
                              {"num_sessions", num_sessions},
                              {"per_type", table}};
  return j;
}

MetricsReport compute_report(std::span<const EvalRecord> records, const SubtypeRuleTable& rules) {
  MetricsReport rep;
  rep.next_action_accuracy = next_action_accuracy(records);
  rep.action_type_macro_f1 = action_type_macro_f1(records);
  rep.fine_grained_accuracy = fine_grained_accuracy(records, rules);
  rep.session_outcome_weighted_f1 = session_outcome_weighted_f1(records, rules);
  rep.per_type_table = per_type_table(records);
  rep.num_records = records.size();
  for (const auto& r : records) rep.num_sessions += r.is_terminal_step ? 1 : 0;
  return rep;
}

void write_count_csv(std::ostream& os, std::span<const CountRow> rows, bool with_accuracy) {
  os << "type,gold,pred,correct" << (with_accuracy ? ",accuracy" : "") << '\n';
  for (const auto& r : rows) {
    os << r.type << ',' << r.gold_count << ',' << r.pred_count << ',' << r.correct_count;
    if (with_accuracy) os << ',' << fmt(r.accuracy());
    os << '\n';
  }
}

}  // namespace shoprl
