#include <gtest/gtest.h>

#include <random>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "shoprl/context.hpp"
#include "shoprl/prompt.hpp"
#include "oracles/context_oracle.hpp"
#include "support.hpp"

namespace shoprl {
namespace {

using oracle::html_step;
using oracle::oracle_context_tokens;
using oracle::oracle_tokens;
using oracle::random_case;
using oracle::words;

TEST(CountTokens, Examples) {
  EXPECT_EQ(count_tokens(""), 0u);
  EXPECT_EQ(count_tokens("click the buy button"), 4u);
  EXPECT_EQ(count_tokens(std::string(20, 'x')), 3u);
  EXPECT_EQ(count_tokens("  a\t\nb  "), 2u);
  EXPECT_EQ(count_tokens(std::string(8, 'x')), 1u);
  EXPECT_EQ(count_tokens(std::string(9, 'x')), 2u);
}

TEST(CountTokens, MatchesOracleOnRandomText) {
  std::mt19937_64 rng(5);
  const std::string alphabet = "ab \n\t<>=\"xyz";
  for (int t = 0; t < 500; ++t) {
    std::string s(rng() % 200, ' ');
    for (auto& c : s) c = alphabet[rng() % alphabet.size()];
    EXPECT_EQ(count_tokens(s), oracle_tokens(s)) << s;
  }
}

TEST(TokenBudget, Minimum) {
  EXPECT_THROW(TokenBudget(255), std::invalid_argument);
  EXPECT_EQ(TokenBudget(256).max_tokens, 256u);
  EXPECT_EQ(TokenBudget().max_tokens, 4096u);
}

TEST(BuildContext, FittingHistoryKeepsAllHtml) {
  std::vector<Step> steps = {html_step(10, Action::click("a")), html_step(10, Action::click("b")),
                             html_step(10, Action::click("c")), html_step(10, Action::terminate())};
  const auto ctx = build_context(steps, nullptr, 3, TokenBudget(4096));
  ASSERT_EQ(ctx.history.size(), 3u);
  for (const auto& e : ctx.history) EXPECT_TRUE(e.html.has_value());
  EXPECT_EQ(ctx.token_count, oracle_context_tokens(ctx));
  EXPECT_EQ(ctx.dropped_entries, 0u);
}

TEST(BuildContext, BudgetForcingTwoElisions) {
  std::vector<Step> steps = {html_step(150, Action::click("a"), "first"), html_step(150, Action::click("b")),
                             html_step(150, Action::click("c")), html_step(150, Action::terminate())};
  // Budget = cost with entries 0 and 1 elided, computed through the oracle.
  std::vector<HistoryEntry> entries;
  for (std::size_t i = 0; i < 3; ++i) {
    HistoryEntry e{i, steps[i].action, std::nullopt, steps[i].observation.html};
    if (steps[i].rationale) e.rationale = steps[i].rationale->text;
    entries.push_back(e);
  }
  std::size_t budget = oracle_tokens(render_current_page(steps[3].observation.html));
  for (std::size_t i = 0; i < 3; ++i) {
    auto e = entries[i];
    if (i < 2) e.html.reset();
    budget += oracle_tokens(render_history_entry(e));
  }
  const auto ctx = build_context(steps, nullptr, 3, TokenBudget(budget));
  ASSERT_EQ(ctx.history.size(), 3u);
  EXPECT_FALSE(ctx.history[0].html.has_value());
  EXPECT_FALSE(ctx.history[1].html.has_value());
  EXPECT_TRUE(ctx.history[2].html.has_value());
  EXPECT_EQ(ctx.history[0].rationale, std::optional<std::string>("first"));
  EXPECT_EQ(ctx.current_html, steps[3].observation.html);
  EXPECT_EQ(ctx.token_count, budget);
  // One token less forces the third elision.
  const auto tighter = build_context(steps, nullptr, 3, TokenBudget(budget - 1));
  EXPECT_FALSE(tighter.history[2].html.has_value());
}

TEST(BuildContext, DropsWholeEntriesWhenHtmlIsNotEnough) {
  std::vector<Step> steps;
  for (int i = 0; i < 40; ++i) steps.push_back(html_step(5, Action::click("x"), words(20, "why")));
  steps.push_back(html_step(200, Action::terminate()));
  const auto ctx = build_context(steps, nullptr, 40, TokenBudget(600));
  EXPECT_GT(ctx.dropped_entries, 0u);
  EXPECT_LE(ctx.token_count, 600u);
  EXPECT_EQ(ctx.history.size() + ctx.dropped_entries, 40u);
  EXPECT_EQ(ctx.history.front().step_index, ctx.dropped_entries);
}

TEST(BuildContext, BudgetTooSmall) {
  std::vector<Step> steps = {html_step(400, Action::terminate())};
  EXPECT_THROW(build_context(steps, nullptr, 0, TokenBudget(256)), BudgetTooSmall);
  EXPECT_THROW(build_context(steps, nullptr, 1, TokenBudget(4096)), std::out_of_range);
}

TEST(BuildContext, RationalesCanBeExcluded) {
  std::vector<Step> steps = {html_step(3, Action::click("a"), "because"), html_step(3, Action::terminate())};
  EXPECT_TRUE(build_context(steps, nullptr, 1, TokenBudget(), true).history[0].rationale.has_value());
  EXPECT_FALSE(build_context(steps, nullptr, 1, TokenBudget(), false).history[0].rationale.has_value());
}

TEST(BuildContextProperty, TruncationContract) {
  std::mt19937_64 rng(2024);
  std::size_t checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    bool skipped = false;
    EXPECT_EQ(oracle::truncation_violation(random_case(rng), skipped), "") << "trial " << trial;
    checked += skipped ? 0 : 1;
  }
  EXPECT_GT(checked, 800u);
}

TEST(BuildContextProperty, MonotoneInBudget) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    auto c = random_case(rng);
    c.persona.reset();
    std::size_t prev_retained = 0, prev_entries = 0;
    bool first = true;
    for (std::size_t b = 256; b <= 8192; b *= 2) {
      PromptContext ctx;
      try {
        ctx = build_context(c.steps, nullptr, c.t, TokenBudget(b));
      } catch (const BudgetTooSmall&) {
        continue;
      }
      std::size_t retained = 0;
      for (const auto& e : ctx.history) retained += e.html ? 1 : 0;
      if (!first) {
        EXPECT_GE(retained, prev_retained);
        EXPECT_GE(ctx.history.size(), prev_entries);
      }
      prev_retained = retained;
      prev_entries = ctx.history.size();
      first = false;
    }
  }
}

PromptContext two_entry_context(bool with_persona) {
  std::vector<Step> steps = {
      html_step(3, Action::input("search_box", "red shoes"), "need shoes"),
      html_step(2, Action::click("filter_price")),
      Step{testing::page({testing::clickable("buy_now")}), std::nullopt, Action::click("buy_now")},
  };
  static const Persona persona{"u007", {{"age_group", "25-34"}}, {{"style", "deliberate"}},
                               {{"patience", 0.8}, {"price_sensitivity", 0.35}}};
  return build_context(steps, with_persona ? &persona : nullptr, 2, TokenBudget());
}

TEST(Prompt, Deterministic) {
  const auto ctx = two_entry_context(true);
  EXPECT_EQ(render_prompt(ctx, true), render_prompt(ctx, true));
}

TEST(Prompt, PersonaSectionOnlyWhenPresent) {
  EXPECT_NE(render_prompt(two_entry_context(true), true).find("# Persona"), std::string::npos);
  EXPECT_NE(render_prompt(two_entry_context(true), true).find("DO NOT RELY ON IT"), std::string::npos);
  EXPECT_EQ(render_prompt(two_entry_context(false), true).find("# Persona"), std::string::npos);
}

TEST(Prompt, HistoryOldestFirst) {
  const auto text = render_prompt(two_entry_context(false), true);
  const auto a = text.find("## Step 1");
  const auto b = text.find("## Step 2");
  const auto cur = text.find("## Current page");
  ASSERT_NE(a, std::string::npos);
  EXPECT_LT(a, b);
  EXPECT_LT(b, cur);
  EXPECT_LT(text.find("red shoes"), text.find("filter_price"));
}

TEST(Prompt, MatchesGoldenFile) {
  const std::string path = std::string(SHOPRL_TEST_DATA_DIR) + "/golden/prompt_v1.txt";
  // Set SHOPRL_UPDATE_GOLDEN=1 to regenerate after an intentional template change.
  if (std::getenv("SHOPRL_UPDATE_GOLDEN") != nullptr) {
    std::ofstream(path, std::ios::binary) << render_prompt(two_entry_context(true), true);
  }
  std::ifstream is(path, std::ios::binary);
  ASSERT_TRUE(is) << "missing golden prompt";
  std::ostringstream golden;
  golden << is.rdbuf();
  EXPECT_EQ(render_prompt(two_entry_context(true), true), golden.str());
}

TEST(Prompt, OverheadIsConstant) {
  // Static blocks cost the same no matter the dynamic content.
  std::mt19937_64 rng(9);
  std::optional<std::size_t> with_p, without_p;
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = random_case(rng);
    const Persona* p = c.persona ? &*c.persona : nullptr;
    PromptContext ctx;
    try {
      ctx = build_context(c.steps, p, c.t, TokenBudget(c.budget));
    } catch (const BudgetTooSmall&) {
      continue;
    }
    const std::size_t overhead = count_tokens(render_prompt(ctx, true)) - ctx.token_count;
    auto& slot = p ? with_p : without_p;
    if (!slot) slot = overhead;
    EXPECT_EQ(overhead, *slot);
  }
  ASSERT_TRUE(with_p && without_p);
  EXPECT_GT(*with_p, *without_p);
}

}  // namespace
}  // namespace shoprl
