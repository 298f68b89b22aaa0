#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "shoprl/generator.hpp"
#include "shoprl/metrics.hpp"
#include "oracles/metrics_oracle.hpp"

namespace shoprl {
namespace {

using oracle::random_fixture;
using oracle::oracle_subtype;

TEST(MetricsOracle, FiftyRandomFixtures) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto records = random_fixture(seed);
    const auto o = oracle::brute_force_metrics(records);
    EXPECT_NEAR(next_action_accuracy(records), o.accuracy, 1e-12) << seed;
    EXPECT_NEAR(action_type_macro_f1(records), o.macro_f1, 1e-12) << seed;
    EXPECT_NEAR(fine_grained_accuracy(records), o.fine, 1e-12) << seed;
    EXPECT_NEAR(session_outcome_weighted_f1(records), o.outcome_f1, 1e-12) << seed;
  }
}

TEST(MetricsProperty, PermutationInvariant) {
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto records = random_fixture(seed);
    const auto before = compute_report(records);
    std::shuffle(records.begin(), records.end(), rng);
    const auto after = compute_report(records);
    EXPECT_NEAR(before.next_action_accuracy, after.next_action_accuracy, 1e-15);
    EXPECT_NEAR(before.action_type_macro_f1, after.action_type_macro_f1, 1e-15);
    EXPECT_NEAR(before.fine_grained_accuracy, after.fine_grained_accuracy, 1e-15);
    EXPECT_NEAR(before.session_outcome_weighted_f1, after.session_outcome_weighted_f1, 1e-15);
  }
}

TEST(MetricsProperty, ExactMatchImpliesFineMatchOnClicks) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (const auto& r : random_fixture(seed)) {
      if (!r.gold.is_click()) continue;
      const std::vector<EvalRecord> one = {r};
      EXPECT_LE(next_action_accuracy(one), fine_grained_accuracy(one));
    }
  }
}

EvalRecord rec(Action gold, const Action& pred, std::string session = "s", bool terminal = false) {
  return EvalRecord::from_raw(std::move(gold), RawModelOutput{serialize_action_output("", pred)},
                              std::move(session), 0, terminal);
}

EvalRecord rec_other(Action gold) {
  return EvalRecord::from_raw(std::move(gold), RawModelOutput{"no"}, "s", 0, false);
}

TEST(Metrics, PerfectAndHalf) {
  std::vector<EvalRecord> rs = {rec(Action::click("buy_now"), Action::click("buy_now"), "a", true),
                                rec(Action::input("q", "x"), Action::input("q", "X")),
                                rec(Action::terminate(), Action::terminate(), "b", true)};
  EXPECT_EQ(next_action_accuracy(rs), 1.0);
  EXPECT_EQ(action_type_macro_f1(rs), 1.0);
  EXPECT_EQ(fine_grained_accuracy(rs), 1.0);
  EXPECT_EQ(session_outcome_weighted_f1(rs), 1.0);
  rs.push_back(rec(Action::click("a"), Action::click("b")));
  rs.push_back(rec(Action::click("a"), Action::terminate()));
  rs.push_back(rec_other(Action::click("a")));
  EXPECT_EQ(next_action_accuracy(rs), 0.5);
}

TEST(Metrics, SingleClassPerfect) {
  std::vector<EvalRecord> rs = {rec(Action::click("a"), Action::click("a")), rec(Action::click("b"), Action::click("b"))};
  EXPECT_EQ(action_type_macro_f1(rs), 1.0);
}

TEST(Metrics, FineGrainedExamples) {
  EXPECT_EQ(fine_grained_accuracy(std::vector{rec(Action::click("place_order"), Action::click("buy_now"))}), 1.0);
  EXPECT_EQ(fine_grained_accuracy(std::vector{rec(Action::input("q", "x"), Action::click("review_link"))}), 0.0);
  EXPECT_EQ(fine_grained_accuracy(std::vector{rec(Action::terminate(), Action::terminate())}), 1.0);
}

TEST(Metrics, OutcomeAllNeitherIsZero) {
  std::vector<EvalRecord> rs = {rec(Action::click("buy_now"), Action::click("nav_home"), "a", true),
                                rec(Action::terminate(), Action::input("q", "x"), "b", true)};
  EXPECT_EQ(session_outcome_weighted_f1(rs), 0.0);
  std::vector<EvalRecord> bad = {rec(Action::click("nav_home"), Action::click("nav_home"), "a", true)};
  EXPECT_THROW(session_outcome_weighted_f1(bad), std::invalid_argument);
}

// Click-heavy predictor that never terminates and emits unparseable output:
// gold 786 click / 76 input / 40 terminate; predicted 831 / 4 / 0 / 67 other.
std::vector<EvalRecord> click_only_fixture() {
  std::vector<EvalRecord> rs;
  auto add = [&rs](int n, const Action& gold, std::optional<Action> pred) {
    for (int i = 0; i < n; ++i) rs.push_back(pred ? rec(gold, *pred) : rec_other(gold));
  };
  const auto click = Action::click("filter_price");
  const auto input = Action::input("search_box", "red");
  add(739, click, click);
  add(3, click, input);
  add(44, click, std::nullopt);
  add(1, input, input);
  add(52, input, click);
  add(23, input, std::nullopt);
  add(40, Action::terminate(), click);
  return rs;
}

TEST(Metrics, ClickOnlyPredictorWithSpuriousOther) {
  const auto rs = click_only_fixture();
  const double expected = (2.0 * 739 / (2 * 739 + 92 + 47) + 2.0 * 1 / (2 + 3 + 75) + 0.0) / 3.0;
  EXPECT_NEAR(action_type_macro_f1(rs), expected, 1e-12);
  EXPECT_NEAR(action_type_macro_f1(rs), oracle::brute_force_metrics(rs).macro_f1, 1e-12);
  const auto table = per_type_table(rs);
  ASSERT_EQ(table.size(), 4u);
  EXPECT_EQ(table[0].type, "click");
  EXPECT_EQ(table[0].gold_count, 786u);
  EXPECT_EQ(table[0].pred_count, 831u);
  EXPECT_EQ(table[0].correct_count, 739u);
  EXPECT_EQ(table[1].type, "input");
  EXPECT_EQ(table[1].pred_count, 4u);
  EXPECT_EQ(table[1].correct_count, 1u);
  EXPECT_EQ(table[2].type, "terminate");
  EXPECT_EQ(table[2].gold_count, 40u);
  EXPECT_EQ(table[2].pred_count, 0u);
  EXPECT_EQ(table[3].type, "other");
  EXPECT_EQ(table[3].gold_count, 0u);
  EXPECT_EQ(table[3].pred_count, 67u);
}

TEST(Metrics, DistributionReportCounts) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto rs = random_fixture(seed);
    const auto rows = distribution_report(rs);
    ASSERT_EQ(rows.size(), kNumClickSubtypes + 3);
    std::size_t gold = 0, pred = 0, correct = 0;
    for (const auto& r : rows) {
      gold += r.gold_count;
      pred += r.pred_count;
      correct += r.correct_count;
      EXPECT_LE(r.correct_count, std::min(r.gold_count, r.pred_count));
    }
    EXPECT_EQ(gold, rs.size());
    EXPECT_EQ(pred, rs.size());
    EXPECT_EQ(rows.back().type, "other");
    EXPECT_EQ(rows.back().gold_count, 0u);
    EXPECT_NEAR(static_cast<double>(correct) / rs.size(), next_action_accuracy(rs), 1e-12);
  }
}

TEST(Metrics, ReportAndCsv) {
  const auto rs = random_fixture(4);
  const auto report = compute_report(rs);
  std::set<std::string> sessions;
  for (const auto& r : rs) sessions.insert(r.session_id);
  EXPECT_EQ(report.num_records, rs.size());
  EXPECT_EQ(report.num_sessions, sessions.size());
  for (const double v : {report.next_action_accuracy, report.action_type_macro_f1, report.fine_grained_accuracy,
                         report.session_outcome_weighted_f1}) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  std::ostringstream os;
  write_count_csv(os, report.per_type_table, true);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "type,gold,pred,correct,accuracy");
  std::ostringstream plain;
  write_count_csv(plain, report.per_type_table, false);
  EXPECT_EQ(plain.str().substr(0, plain.str().find('\n')), "type,gold,pred,correct");
  EXPECT_EQ(report.to_json()["num_records"], rs.size());
}

}  // namespace
}  // namespace shoprl
