#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shoprl/action.hpp"
#include "shoprl/click_subtype.hpp"

namespace shoprl {

enum class InteractableRole { kClickable, kInputField };

struct Interactable {
  std::string name;
  InteractableRole role;

  friend bool operator==(const Interactable&, const Interactable&) = default;
};

// One HTML page state. Every interactable name appears as a name="..."
// attribute in the markup and names are unique within the page.
struct Observation {
  std::string html;
  std::vector<Interactable> interactables;

  const Interactable* find(std::string_view name) const;

  friend bool operator==(const Observation&, const Observation&) = default;
};

enum class RationaleProvenance { kHuman, kAugmented };

struct Rationale {
  std::string text;
  RationaleProvenance provenance = RationaleProvenance::kHuman;

  friend bool operator==(const Rationale&, const Rationale&) = default;
};

struct Persona {
  std::string user_id;
  std::map<std::string, std::string> demographics;
  std::map<std::string, std::string> personality;
  // Preference scalars, each in [0, 1].
  std::map<std::string, double> shopping_prefs;

  friend bool operator==(const Persona&, const Persona&) = default;
};

struct Step {
  Observation observation;
  std::optional<Rationale> rationale;
  Action action;

  friend bool operator==(const Step&, const Step&) = default;
};

struct Session {
  std::string session_id;
  std::string user_id;
  std::vector<Step> steps;

  friend bool operator==(const Session&, const Session&) = default;
};

enum class SessionOutcome { kPurchaseEnd, kTerminateEnd };

std::string_view to_string(SessionOutcome outcome);

class InvalidSession : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Whether a session ends in a purchase click or a terminate. Throws
// InvalidSession when the session is empty or ends in anything else.
SessionOutcome session_outcome(const Session& session,
                               const SubtypeRuleTable& rules = SubtypeRuleTable::defaults());

struct Violation {
  std::optional<std::size_t> step;  // 0-based; absent for session-level rules
  std::string rule;
  std::string detail;
};

// Rules: empty, terminal-action, terminate-not-final, target-missing,
// role-mismatch, duplicate-interactable, name-not-in-html, empty-rationale,
// missing-id.
std::vector<Violation> validate_session(
    const Session& session, const SubtypeRuleTable& rules = SubtypeRuleTable::defaults());

// Rules: missing-id, pref-out-of-range.
std::vector<Violation> validate_persona(const Persona& persona);

}  // namespace shoprl
