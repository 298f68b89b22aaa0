#include "shoprl/session.hpp"

#include <cmath>
#include <set>

namespace shoprl {

const Interactable* Observation::find(std::string_view name) const {
  for (const auto& item : interactables) {
    if (item.name == name) return &item;
  }
  return nullptr;
}

std::string_view to_string(SessionOutcome outcome) {
  return outcome == SessionOutcome::kPurchaseEnd ? "purchase" : "terminate";
}

SessionOutcome session_outcome(const Session& session, const SubtypeRuleTable& rules) {
  if (session.steps.empty()) throw InvalidSession("session '" + session.session_id + "' is empty");
  const Action& last = session.steps.back().action;
  if (last.is_terminate()) return SessionOutcome::kTerminateEnd;
  if (last.is_click() && rules.classify(last.element_name()) == ClickSubtype::kPurchase) {
    return SessionOutcome::kPurchaseEnd;
  }
  throw InvalidSession("session '" + session.session_id +
                       "' does not end in a purchase click or terminate");
}

std::vector<Violation> validate_session(const Session& session, const SubtypeRuleTable& rules) {
  std::vector<Violation> out;
  if (session.session_id.empty() || session.user_id.empty()) {
    out.push_back({std::nullopt, "missing-id", "session_id and user_id must be non-empty"});
  }
  if (session.steps.empty()) {
    out.push_back({std::nullopt, "empty", "session has no steps"});
    return out;
  }
  for (std::size_t i = 0; i < session.steps.size(); ++i) {
    const Step& step = session.steps[i];
    const Observation& obs = step.observation;

    std::set<std::string_view> seen;
    for (const auto& item : obs.interactables) {
      if (!seen.insert(item.name).second) {
        out.push_back({i, "duplicate-interactable", item.name});
      }
      if (item.name.empty() || obs.html.find("name=\"" + item.name + "\"") == std::string::npos) {
        out.push_back({i, "name-not-in-html", item.name});
      }
    }

    if (step.rationale && step.rationale->text.empty()) {
      out.push_back({i, "empty-rationale", "rationale text must be non-empty"});
    }

    const Action& action = step.action;
    if (action.is_terminate()) {
      if (i + 1 != session.steps.size()) {
        out.push_back({i, "terminate-not-final", "terminate must be the last action"});
      }
      continue;
    }
    const Interactable* target = obs.find(action.element_name());
    if (target == nullptr) {
      out.push_back({i, "target-missing", action.element_name()});
    } else {
      const auto expected =
          action.is_click() ? InteractableRole::kClickable : InteractableRole::kInputField;
      if (target->role != expected) out.push_back({i, "role-mismatch", action.element_name()});
    }
  }

  const Action& last = session.steps.back().action;
  const bool purchase_end =
      last.is_click() && rules.classify(last.element_name()) == ClickSubtype::kPurchase;
  if (!last.is_terminate() && !purchase_end) {
    out.push_back({session.steps.size() - 1, "terminal-action",
                   "last action must be terminate or a purchase click"});
  }
  return out;
}

std::vector<Violation> validate_persona(const Persona& persona) {
  std::vector<Violation> out;
  if (persona.user_id.empty()) out.push_back({std::nullopt, "missing-id", "user_id is empty"});
  for (const auto& [key, value] : persona.shopping_prefs) {
    if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
      out.push_back({std::nullopt, "pref-out-of-range", key});
    }
  }
  return out;
}

}  // namespace shoprl
