#include <gtest/gtest.h>

#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "shoprl/action.hpp"

namespace shoprl {
namespace {

FormatError reason_of(const std::string& text) {
  const auto r = parse_action_output(RawModelOutput{text});
  EXPECT_TRUE(std::holds_alternative<FormatViolation>(r)) << text;
  if (!std::holds_alternative<FormatViolation>(r)) return FormatError::kNotJson;
  return std::get<FormatViolation>(r).reason;
}

TEST(ActionParse, ClickExample) {
  const auto r = parse_action_output(
      RawModelOutput{R"({"rationale":"compare prices","action":{"type":"click","name":"filter_price"}})"});
  ASSERT_TRUE(std::holds_alternative<ParsedOutput>(r));
  EXPECT_EQ(std::get<ParsedOutput>(r).action, Action::click("filter_price"));
  EXPECT_EQ(std::get<ParsedOutput>(r).rationale, "compare prices");
}

TEST(ActionParse, TerminateExample) {
  const auto r = parse_action_output(RawModelOutput{R"({"rationale":"done","action":{"type":"terminate"}})"});
  ASSERT_TRUE(std::holds_alternative<ParsedOutput>(r));
  EXPECT_TRUE(std::get<ParsedOutput>(r).action.is_terminate());
}

TEST(ActionParse, InputExample) {
  const auto r = parse_action_output(
      RawModelOutput{R"({"rationale":"r","action":{"type":"input","name":"search_box","text":"earbuds"}})"});
  ASSERT_TRUE(std::holds_alternative<ParsedOutput>(r));
  EXPECT_EQ(std::get<ParsedOutput>(r).action, Action::input("search_box", "earbuds"));
}

TEST(ActionParse, SurroundingWhitespaceTolerated) {
  const auto r = parse_action_output(RawModelOutput{"\n  {\"rationale\":\"x\",\"action\":{\"type\":\"terminate\"}} \t\n"});
  EXPECT_TRUE(std::holds_alternative<ParsedOutput>(r));
}

TEST(ActionParse, ViolationReasons) {
  EXPECT_EQ(reason_of(R"({"action":{"type":"click","name":"x"}})"), FormatError::kMissingField);
  EXPECT_EQ(reason_of(R"({"rationale":"r"})"), FormatError::kMissingField);
  EXPECT_EQ(reason_of(R"({"rationale":"r","action":{}})"), FormatError::kMissingField);
  EXPECT_EQ(reason_of(R"({"rationale":"r","action":{"type":"click"}})"), FormatError::kMissingField);
  EXPECT_EQ(reason_of(R"({"rationale":"r","action":{"type":"input","name":"q"}})"), FormatError::kMissingField);
  EXPECT_EQ(reason_of(R"({"rationale":"r","action":{"type":"scroll"}})"), FormatError::kUnknownType);
  EXPECT_EQ(reason_of(R"({"rationale":"r","action":{"type":7}})"), FormatError::kUnknownType);
  EXPECT_EQ(reason_of(R"({"rationale":"r","action":{"type":"terminate","name":"x"}})"),
            FormatError::kBadAttributes);
  EXPECT_EQ(reason_of(R"({"rationale":"r","action":{"type":"click","name":"x","text":"y"}})"),
            FormatError::kBadAttributes);
  EXPECT_EQ(reason_of(R"({"rationale":"r","action":{"type":"click","name":""}})"), FormatError::kBadAttributes);
  EXPECT_EQ(reason_of(R"({"rationale":3,"action":{"type":"terminate"}})"), FormatError::kBadAttributes);
  EXPECT_EQ(reason_of(R"({"rationale":"r","action":{"type":"terminate"},"extra":1})"),
            FormatError::kBadAttributes);
  EXPECT_EQ(reason_of("not json at all"), FormatError::kNotJson);
  EXPECT_EQ(reason_of(""), FormatError::kNotJson);
  EXPECT_EQ(reason_of(R"({"rationale":"r","action":{"type":"terminate"}} trailing)"), FormatError::kNotJson);
  EXPECT_EQ(reason_of(R"(Sure! {"rationale":"r","action":{"type":"terminate"}})"), FormatError::kNotJson);
  EXPECT_EQ(reason_of(R"({"rationale":"r","action":{"type":"terminate"}}{"rationale":"r","action":{"type":"terminate"}})"),
            FormatError::kMultipleObjects);
  EXPECT_EQ(reason_of(R"({"rationale":"r", "action":)"), FormatError::kNotJson);
}

TEST(ActionParse, BracesInsideStringsDoNotConfuseScanner) {
  const auto r = parse_action_output(
      RawModelOutput{R"({"rationale":"a } b { \" c","action":{"type":"click","name":"x}"}})"});
  ASSERT_TRUE(std::holds_alternative<ParsedOutput>(r));
  EXPECT_EQ(std::get<ParsedOutput>(r).rationale, "a } b { \" c");
  EXPECT_EQ(std::get<ParsedOutput>(r).action.element_name(), "x}");
}

TEST(ActionParse, SerializePutsRationaleFirst) {
  const auto s = serialize_action_output("why", Action::click("buy_now"));
  EXPECT_EQ(s, R"({"rationale":"why","action":{"type":"click","name":"buy_now"}})");
}

std::string random_string(std::mt19937_64& rng, bool allow_empty) {
  static const std::string alphabet = "abcXYZ_- {}[]\"\\:,\t\n0129\xc3\xa9";
  std::uniform_int_distribution<int> len(allow_empty ? 0 : 1, 12);
  std::string s;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    char c = alphabet[rng() % alphabet.size()];
    // Keep the two-byte UTF-8 sequence intact.
    if (c == '\xc3' || c == '\xa9') {
      s += "\xc3\xa9";
    } else {
      s += c;
    }
  }
  if (!allow_empty && s.empty()) s = "a";
  return s;
}

TEST(ActionProperty, SerializeParseRoundTrip) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    Action action = Action::terminate();
    switch (rng() % 3) {
      case 0: action = Action::click(random_string(rng, false)); break;
      case 1: action = Action::input(random_string(rng, false), random_string(rng, true)); break;
      default: break;
    }
    const auto rationale = random_string(rng, true);
    const auto r = parse_action_output(RawModelOutput{serialize_action_output(rationale, action)});
    ASSERT_TRUE(std::holds_alternative<ParsedOutput>(r)) << serialize_action_output(rationale, action);
    EXPECT_EQ(std::get<ParsedOutput>(r).action, action);
    EXPECT_EQ(std::get<ParsedOutput>(r).rationale, rationale);
  }
}

TEST(ActionJson, RoundTripAndErrors) {
  for (const auto& a : {Action::click("buy_now"), Action::input("search_box", "red shoes"), Action::terminate()}) {
    EXPECT_EQ(action_from_json(action_to_json(a)), a);
  }
  EXPECT_THROW(action_from_json(nlohmann::json::parse(R"({"type":"hover"})")), std::invalid_argument);
  EXPECT_THROW(action_from_json(nlohmann::json::parse(R"([1])")), std::invalid_argument);
  EXPECT_THROW(Action::click(""), std::invalid_argument);
}

}  // namespace
}  // namespace shoprl
