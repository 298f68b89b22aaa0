#include "shoprl/click_subtype.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace shoprl {

namespace {

constexpr std::array<std::string_view, kNumClickSubtypes> kNames = {
    "review",         "search",         "product_option", "product_link", "other",
    "purchase",       "nav_bar",        "page_related",   "quantity",     "suggested_term",
    "cart_side_bar",  "cart_page_select", "filter",
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(ClickSubtype subtype) { return kNames[index_of(subtype)]; }

std::optional<ClickSubtype> click_subtype_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return kAllClickSubtypes[i];
  }
  return std::nullopt;
}

SubtypeRuleTable::SubtypeRuleTable(std::vector<SubtypeRule> rules) : rules_(std::move(rules)) {
  for (auto& rule : rules_) {
    for (auto& kw : rule.keywords) {
      if (kw.empty()) throw std::invalid_argument("subtype rule keyword must be non-empty");
      kw = lower(kw);
    }
  }
}

const SubtypeRuleTable& SubtypeRuleTable::defaults() {
  static const SubtypeRuleTable table({
      {ClickSubtype::kPurchase, {"buy", "purchase", "checkout", "place_order"}},
      {ClickSubtype::kSearch, {"search"}},
      {ClickSubtype::kReview, {"review", "rating", "star"}},
      {ClickSubtype::kFilter, {"filter", "sort"}},
      {ClickSubtype::kNavBar, {"nav", "menu", "logo"}},
      {ClickSubtype::kQuantity, {"qty", "quantity"}},
      {ClickSubtype::kSuggestedTerm, {"suggest"}},
      {ClickSubtype::kCartSideBar, {"cart_side"}},
      {ClickSubtype::kCartPageSelect, {"cart_select", "cart_item"}},
      {ClickSubtype::kProductOption, {"option", "size", "color", "variant"}},
      {ClickSubtype::kProductLink, {"product", "item_link"}},
      {ClickSubtype::kPageRelated, {"page", "next", "prev"}},
  });
  return table;
}

SubtypeRuleTable SubtypeRuleTable::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("subtype rules must be a JSON array");
  std::vector<SubtypeRule> rules;
  for (const auto& entry : j) {
    const auto name = entry.at("subtype").get<std::string>();
    const auto subtype = click_subtype_from_string(name);
    if (!subtype) throw std::invalid_argument("unknown click subtype in rules: " + name);
    rules.push_back({*subtype, entry.at("keywords").get<std::vector<std::string>>()});
  }
  return SubtypeRuleTable(std::move(rules));
}

nlohmann::json SubtypeRuleTable::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& rule : rules_) {
    out.push_back({{"subtype", std::string(to_string(rule.subtype))}, {"keywords", rule.keywords}});
  }
  return out;
}

ClickSubtype SubtypeRuleTable::classify(std::string_view element_name) const {
  const std::string name = lower(element_name);
  for (const auto& rule : rules_) {
    for (const auto& kw : rule.keywords) {
      if (name.find(kw) != std::string::npos) return rule.subtype;
    }
  }
  return ClickSubtype::kOther;
}

ClickSubtype classify_click_subtype(std::string_view element_name) {
  return SubtypeRuleTable::defaults().classify(element_name);
}

}  // namespace shoprl
