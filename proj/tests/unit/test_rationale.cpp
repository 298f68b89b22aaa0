#include <gtest/gtest.h>

#include "shoprl/rationale.hpp"
#include "support.hpp"

namespace shoprl {
namespace {

const Persona kPriceSensitive{"u1", {}, {}, {{"brand_loyalty", 0.1}, {"price_sensitivity", 0.9}}};

TEST(Rationale, SalientTrait) {
  EXPECT_EQ(salient_trait(&kPriceSensitive), "price_sensitivity");
  EXPECT_EQ(salient_trait(nullptr), "");
  const Persona tie{"u", {}, {}, {{"patience", 0.5}, {"brand_loyalty", 0.5}}};
  EXPECT_EQ(salient_trait(&tie), "brand_loyalty");
}

TEST(Rationale, TemplateExamples) {
  EXPECT_EQ(templated_rationale(Action::click("filter_price"), &kPriceSensitive),
            "I want to narrow down by price, so I click filter_price.");
  EXPECT_EQ(templated_rationale(Action::terminate(), nullptr),
            "Nothing here fits what I am looking for, so I close the window.");
  EXPECT_EQ(templated_rationale(Action::click("nav_home"), &kPriceSensitive),
            "Because I care about the price, I click nav_home.");
  EXPECT_EQ(templated_rationale(Action::input("search_box", "red shoes"), nullptr),
            "I type \"red shoes\" into search_box to find what I need.");
}

TEST(Rationale, AugmentFillsOnlyMissing) {
  auto s = testing::simple_session("s1", "u1");
  const auto out = augment_rationales({s}, {kPriceSensitive});
  ASSERT_EQ(out.size(), 1u);
  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    ASSERT_TRUE(out[0].steps[i].rationale.has_value());
    if (s.steps[i].rationale) {
      EXPECT_EQ(*out[0].steps[i].rationale, *s.steps[i].rationale);
    } else {
      EXPECT_EQ(out[0].steps[i].rationale->provenance, RationaleProvenance::kAugmented);
      EXPECT_EQ(out[0].steps[i].rationale->text, templated_rationale(s.steps[i].action, &kPriceSensitive));
    }
  }
  // A fully annotated dataset is left as is.
  EXPECT_EQ(augment_rationales(out, {kPriceSensitive}), out);
}

}  // namespace
}  // namespace shoprl
