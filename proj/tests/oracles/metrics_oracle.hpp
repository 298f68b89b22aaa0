#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "shoprl/generator.hpp"
#include "shoprl/metrics.hpp"

// Brute-force recomputation of the four evaluation metrics from raw records.
namespace shoprl::oracle {

// Subtype labels come from the generator's element lists, not the rule table.
inline std::string oracle_subtype(const std::string& name) {
  for (const auto st : kAllClickSubtypes) {
    const auto& names = element_names(st);
    if (std::find(names.begin(), names.end(), name) != names.end()) return std::string(to_string(st));
  }
  return "other";
}

inline std::string lower_trim(std::string s) {
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  while (!s.empty() && s.back() == ' ') s.pop_back();
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct OracleRecord {
  std::string gold_type, gold_name, gold_text;
  std::string pred_type;  // "other" when the output did not parse
  std::string pred_name, pred_text;
  std::string session;
  bool terminal = false;
};

inline OracleRecord view(const EvalRecord& r) {
  OracleRecord o;
  o.gold_type = std::string(to_string(r.gold.kind()));
  o.gold_name = r.gold.element_name();
  o.gold_text = r.gold.text();
  if (const auto* p = r.pred_action()) {
    o.pred_type = std::string(to_string(p->kind()));
    o.pred_name = p->element_name();
    o.pred_text = p->text();
  } else {
    o.pred_type = "other";
  }
  o.session = r.session_id;
  o.terminal = r.is_terminal_step;
  return o;
}

inline bool oracle_exact(const OracleRecord& o) {
  if (o.gold_type != o.pred_type) return false;
  if (o.gold_type == "terminate") return true;
  if (o.gold_name != o.pred_name) return false;
  return o.gold_type == "click" || lower_trim(o.gold_text) == lower_trim(o.pred_text);
}

inline double f1(double tp, double fp, double fn) { return tp == 0.0 ? 0.0 : 2 * tp / (2 * tp + fp + fn); }

struct OracleMetrics {
  double accuracy, macro_f1, fine, outcome_f1;
};

inline OracleMetrics brute_force_metrics(std::span<const EvalRecord> records) {
  std::vector<OracleRecord> rs;
  for (const auto& r : records) rs.push_back(view(r));
  const double n = static_cast<double>(rs.size());
  OracleMetrics m{};
  // Confusion matrix over gold {click,input,terminate} x pred {.., other}.
  std::map<std::pair<std::string, std::string>, double> cm;
  double exact = 0, fine = 0;
  for (const auto& o : rs) {
    exact += oracle_exact(o);
    cm[{o.gold_type, o.pred_type}] += 1;
    if (o.gold_type == "click") {
      fine += o.pred_type == "click" && oracle_subtype(o.pred_name) == oracle_subtype(o.gold_name);
    } else {
      fine += o.pred_type == o.gold_type;
    }
  }
  m.accuracy = exact / n;
  m.fine = fine / n;
  const std::vector<std::string> gold_classes = {"click", "input", "terminate"};
  const std::vector<std::string> pred_classes = {"click", "input", "terminate", "other"};
  double sum = 0;
  int present = 0;
  for (const auto& c : gold_classes) {
    double tp = cm[{c, c}], gold_total = 0, pred_total = 0;
    for (const auto& p : pred_classes) gold_total += cm[{c, p}];
    for (const auto& g : gold_classes) pred_total += cm[{g, c}];
    if (gold_total == 0 && pred_total == 0) continue;
    ++present;
    sum += f1(tp, pred_total - tp, gold_total - tp);
  }
  m.macro_f1 = sum / present;

  // Session outcomes from terminal records.
  std::map<std::pair<std::string, std::string>, double> oc;
  double sessions = 0;
  for (const auto& o : rs) {
    if (!o.terminal) continue;
    const std::string gold = o.gold_type == "terminate" ? "terminate" : "purchase";
    std::string pred = "neither";
    if (o.pred_type == "terminate") pred = "terminate";
    if (o.pred_type == "click" && oracle_subtype(o.pred_name) == "purchase") pred = "purchase";
    oc[{gold, pred}] += 1;
    sessions += 1;
  }
  double weighted = 0;
  for (const std::string c : {"purchase", "terminate"}) {
    const double tp = oc[{c, c}];
    double support = 0, predicted = 0;
    for (const std::string p : {"purchase", "terminate", "neither"}) support += oc[{c, p}];
    for (const std::string g : {"purchase", "terminate"}) predicted += oc[{g, c}];
    if (support == 0) continue;
    weighted += support / sessions * f1(tp, predicted - tp, support - tp);
  }
  m.outcome_f1 = weighted;
  return m;
}

// Random records mixing exact hits, wrong actions and unparseable output.
inline std::string random_name(std::mt19937_64& rng, bool purchase) {
  if (purchase) {
    const auto& p = element_names(ClickSubtype::kPurchase);
    return p[rng() % p.size()];
  }
  if (rng() % 10 == 0) return "zzz_widget";
  const auto st = kAllClickSubtypes[rng() % kNumClickSubtypes];
  const auto& names = element_names(st);
  return names[rng() % names.size()];
}

inline Action random_action(std::mt19937_64& rng) {
  static const std::vector<std::string> texts = {"red shoes", "Red Shoes ", "blue"};
  switch (rng() % 4) {
    case 0: return Action::input(rng() % 5 ? "search_box" : "search_box_2", texts[rng() % texts.size()]);
    case 1: return Action::terminate();
    default: return Action::click(random_name(rng, rng() % 6 == 0));
  }
}

inline std::vector<EvalRecord> random_fixture(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<EvalRecord> out;
  const std::size_t sessions = 1 + rng() % 20;
  for (std::size_t s = 0; s < sessions; ++s) {
    const std::size_t len = 1 + rng() % 6;
    for (std::size_t t = 0; t < len; ++t) {
      const bool terminal = t + 1 == len;
      Action gold = random_action(rng);
      if (terminal) {
        gold = rng() % 2 ? Action::terminate() : Action::click(random_name(rng, true));
      } else if (gold.is_terminate()) {
        gold = Action::click(random_name(rng, false));
      }
      RawModelOutput raw;
      const auto r = rng() % 10;
      if (r < 4) {
        raw.text = serialize_action_output("x", gold);
      } else if (r < 9) {
        raw.text = serialize_action_output("x", random_action(rng));
      } else {
        raw.text = R"({"rationale":"x","action":{"type":"scroll"}})";
      }
      out.push_back(EvalRecord::from_raw(gold, raw, "s" + std::to_string(s), t, terminal));
    }
  }
  return out;
}

}  // namespace shoprl::oracle
