#include "shoprl/rationale.hpp"

#include <map>
#include <string_view>

namespace shoprl {

namespace {

std::string_view trait_phrase(const std::string& trait) {
  static const std::map<std::string, std::string_view, std::less<>> kPhrases = {
      {"price_sensitivity", "the price"},
      {"brand_loyalty", "brands I trust"},
      {"patience", "taking my time"},
      {"review_reliance", "what other buyers say"},
  };
  const auto it = kPhrases.find(trait);
  return it == kPhrases.end() ? std::string_view{} : it->second;
}

std::string humanize(const std::string& key) {
  std::string out = key;
  for (auto& c : out) {
    if (c == '_') c = ' ';
  }
  return out;
}

// Trait-specific phrasings; others fall back to the generic template.
std::string special_case(ClickSubtype subtype, const std::string& trait, const Action& a) {
  const std::string& el = a.element_name();
  if (trait == "price_sensitivity") {
    if (subtype == ClickSubtype::kFilter) return "I want to narrow down by price, so I click " + el + ".";
    if (subtype == ClickSubtype::kProductLink) return "This one looks affordable, so I open " + el + ".";
  }
  if (trait == "review_reliance" && subtype == ClickSubtype::kReview) {
    return "I want to read what other buyers say before deciding, so I click " + el + ".";
  }
  if (trait == "brand_loyalty" && subtype == ClickSubtype::kProductLink) {
    return "It is from a brand I already trust, so I open " + el + ".";
  }
  return {};
}

}  // namespace

std::string salient_trait(const Persona* persona) {
  if (persona == nullptr || persona->shopping_prefs.empty()) return {};
  auto best = persona->shopping_prefs.begin();
  for (auto it = persona->shopping_prefs.begin(); it != persona->shopping_prefs.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

std::string templated_rationale(const Action& action, const Persona* persona,
                                const SubtypeRuleTable& rules) {
  const std::string trait = salient_trait(persona);
  std::string because;
  if (!trait.empty()) {
    const auto phrase = trait_phrase(trait);
    because = "Because I care about " + (phrase.empty() ? humanize(trait) : std::string(phrase)) + ", ";
  }

  if (action.is_terminate()) {
    if (trait == "price_sensitivity") return "Nothing here fits my budget, so I close the window.";
    return "Nothing here fits what I am looking for, so I close the window.";
  }
  if (action.is_input()) {
    const std::string verb = "type \"" + action.text() + "\" into " + action.element_name();
    return because.empty() ? "I " + verb + " to find what I need." : because + "I " + verb + ".";
  }

  const auto subtype = rules.classify(action.element_name());
  if (auto special = special_case(subtype, trait, action); !special.empty()) return special;
  if (subtype == ClickSubtype::kPurchase) {
    return because.empty() ? "This is what I want, so I click " + action.element_name() + "."
                           : because + "I am ready to buy and click " + action.element_name() + ".";
  }
  const std::string verb = "click " + action.element_name();
  return because.empty() ? "I " + verb + " to continue shopping." : because + "I " + verb + ".";
}

std::vector<Session> augment_rationales(std::vector<Session> sessions,
                                        const std::vector<Persona>& personas) {
  std::map<std::string_view, const Persona*> by_user;
  for (const auto& p : personas) by_user[p.user_id] = &p;
  for (auto& session : sessions) {
    const auto it = by_user.find(session.user_id);
    const Persona* persona = it == by_user.end() ? nullptr : it->second;
    for (auto& step : session.steps) {
      if (step.rationale) continue;
      step.rationale = Rationale{templated_rationale(step.action, persona),
                                 RationaleProvenance::kAugmented};
    }
  }
  return sessions;
}

}  // namespace shoprl
