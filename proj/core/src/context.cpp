#include "shoprl/context.hpp"

#include <cctype>
#include <cstdio>

#include <nlohmann/json.hpp>

namespace shoprl {

std::size_t count_tokens(std::string_view text) {
  std::size_t tokens = 0;
  std::size_t run = 0;
  auto flush = [&] {
    if (run > 0) tokens += (run + 7) / 8;
    run = 0;
  };
  for (const char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      ++run;
    }
  }
  flush();
  return tokens;
}

TokenBudget::TokenBudget(std::size_t max) : max_tokens(max) {
  if (max < kMinTokens) {
    throw std::invalid_argument("token budget must be at least " + std::to_string(kMinTokens));
  }
}

std::string render_persona_block(const Persona& persona) {
  std::string out = "user_id: " + persona.user_id + "\n";
  auto section = [&out](std::string_view title, const auto& map, auto&& fmt) {
    if (map.empty()) return;
    out += title;
    out += ":";
    for (const auto& [key, value] : map) {
      out += " ";
      out += key;
      out += "=";
      out += fmt(value);
      out += ";";
    }
    out += "\n";
  };
  auto as_is = [](const std::string& v) { return v; };
  section("demographics", persona.demographics, as_is);
  section("personality", persona.personality, as_is);
  section("shopping_prefs", persona.shopping_prefs, [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  });
  return out;
}

std::string render_history_entry(const HistoryEntry& entry) {
  std::string out = "## Step " + std::to_string(entry.step_index + 1) + "\n";
  out += "Action: " + action_to_json(entry.action).dump() + "\n";
  if (entry.rationale) out += "Rationale: " + *entry.rationale + "\n";
  if (entry.html) out += "HTML:\n" + *entry.html + "\n";
  return out;
}

std::string render_current_page(std::string_view html) {
  std::string out = "## Current page\n";
  out += html;
  out += "\n";
  return out;
}

PromptContext build_context(std::span<const Step> steps, const Persona* persona,
                            std::size_t step_index, TokenBudget budget,
                            bool include_rationales) {
  if (step_index >= steps.size()) {
    throw std::out_of_range("step_index " + std::to_string(step_index) + " outside session of " +
                            std::to_string(steps.size()) + " steps");
  }
  PromptContext ctx;
  ctx.step_index = step_index;
  ctx.current_html = steps[step_index].observation.html;
  if (persona != nullptr) {
    ctx.persona = *persona;
    ctx.persona_block = render_persona_block(*persona);
  }

  const std::size_t fixed = (ctx.persona_block ? count_tokens(*ctx.persona_block) : 0) +
                            count_tokens(render_current_page(ctx.current_html));
  if (fixed > budget.max_tokens) {
    throw BudgetTooSmall("persona and current page need " + std::to_string(fixed) +
                         " tokens, budget is " + std::to_string(budget.max_tokens));
  }

  std::vector<std::size_t> cost;
  std::size_t total = fixed;
  for (std::size_t i = 0; i < step_index; ++i) {
    const Step& step = steps[i];
    HistoryEntry entry{i, step.action, std::nullopt, step.observation.html};
    if (include_rationales && step.rationale) entry.rationale = step.rationale->text;
    cost.push_back(count_tokens(render_history_entry(entry)));
    total += cost.back();
    ctx.history.push_back(std::move(entry));
  }

  // Stage 1: elide html, oldest first.
  for (std::size_t i = 0; i < ctx.history.size() && total > budget.max_tokens; ++i) {
    auto& entry = ctx.history[i];
    entry.html.reset();
    const std::size_t reduced = count_tokens(render_history_entry(entry));
    total -= cost[i] - reduced;
    cost[i] = reduced;
  }
  // Stage 2: drop whole entries, oldest first.
  std::size_t drop = 0;
  while (drop < ctx.history.size() && total > budget.max_tokens) {
    total -= cost[drop];
    ++drop;
  }
  ctx.history.erase(ctx.history.begin(), ctx.history.begin() + static_cast<std::ptrdiff_t>(drop));
  ctx.dropped_entries = drop;
  ctx.token_count = total;
  return ctx;
}

}  // namespace shoprl
