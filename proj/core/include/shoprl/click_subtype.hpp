#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace shoprl {

// Fine-grained click categories, in descending order of corpus frequency.
enum class ClickSubtype {
  kReview,
  kSearch,
  kProductOption,
  kProductLink,
  kOther,
  kPurchase,
  kNavBar,
  kPageRelated,
  kQuantity,
  kSuggestedTerm,
  kCartSideBar,
  kCartPageSelect,
  kFilter,
};

inline constexpr std::size_t kNumClickSubtypes = 13;

inline constexpr std::array<ClickSubtype, kNumClickSubtypes> kAllClickSubtypes = {
    ClickSubtype::kReview,        ClickSubtype::kSearch,       ClickSubtype::kProductOption,
    ClickSubtype::kProductLink,   ClickSubtype::kOther,        ClickSubtype::kPurchase,
    ClickSubtype::kNavBar,        ClickSubtype::kPageRelated,  ClickSubtype::kQuantity,
    ClickSubtype::kSuggestedTerm, ClickSubtype::kCartSideBar,  ClickSubtype::kCartPageSelect,
    ClickSubtype::kFilter,
};

std::string_view to_string(ClickSubtype subtype);
std::optional<ClickSubtype> click_subtype_from_string(std::string_view name);

inline std::size_t index_of(ClickSubtype subtype) { return static_cast<std::size_t>(subtype); }

struct SubtypeRule {
  ClickSubtype subtype;
  std::vector<std::string> keywords;
};

// Ordered keyword rules mapping an element name to a click subtype. Rules are
// tried in order; the first rule with a keyword occurring as a substring of
// the lower-cased element name wins. Names matching no rule are `kOther`.
class SubtypeRuleTable {
 public:
  explicit SubtypeRuleTable(std::vector<SubtypeRule> rules);

  static const SubtypeRuleTable& defaults();

  // Accepts [{"subtype": "filter", "keywords": ["filter", "sort"]}, ...].
  static SubtypeRuleTable from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  ClickSubtype classify(std::string_view element_name) const;

  const std::vector<SubtypeRule>& rules() const { return rules_; }

 private:
  std::vector<SubtypeRule> rules_;
};

// Classifies with the default rule table.
ClickSubtype classify_click_subtype(std::string_view element_name);

}  // namespace shoprl
