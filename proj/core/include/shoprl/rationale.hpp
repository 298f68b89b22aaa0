#pragma once

#include <string>
#include <vector>

#include "shoprl/action.hpp"
#include "shoprl/click_subtype.hpp"
#include "shoprl/session.hpp"

namespace shoprl {

// The persona preference with the largest value (ties: alphabetical first),
// or "" when there is no persona or it has no preferences.
std::string salient_trait(const Persona* persona);

// Deterministic rationale keyed on (action kind, click subtype, salient
// persona trait).
std::string templated_rationale(const Action& action, const Persona* persona,
                                const SubtypeRuleTable& rules = SubtypeRuleTable::defaults());

// Fills every missing rationale with a templated one (provenance augmented);
// existing rationales are left untouched.
std::vector<Session> augment_rationales(std::vector<Session> sessions,
                                        const std::vector<Persona>& personas);

}  // namespace shoprl
