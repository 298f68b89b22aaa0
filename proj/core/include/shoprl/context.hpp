#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shoprl/session.hpp"

namespace shoprl {

// Surrogate tokenizer: one token per maximal non-whitespace run, and runs
// longer than 8 characters count ceil(len / 8).
std::size_t count_tokens(std::string_view text);

class BudgetTooSmall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TokenBudget {
  static constexpr std::size_t kMinTokens = 256;
  static constexpr std::size_t kSmall = 4096;
  static constexpr std::size_t kLarge = 16384;

  explicit TokenBudget(std::size_t max = kSmall);

  std::size_t max_tokens;
};

struct HistoryEntry {
  std::size_t step_index;  // 0-based position in the session
  Action action;
  std::optional<std::string> rationale;
  std::optional<std::string> html;  // absent once elided
};

// Everything a policy sees when predicting step `step_index`.
struct PromptContext {
  std::optional<std::string> persona_block;
  std::optional<Persona> persona;
  std::vector<HistoryEntry> history;  // oldest first
  std::string current_html;
  std::size_t token_count = 0;
  std::size_t step_index = 0;
  std::size_t dropped_entries = 0;
};

// Text blocks whose token counts make up PromptContext::token_count.
std::string render_persona_block(const Persona& persona);
std::string render_history_entry(const HistoryEntry& entry);
std::string render_current_page(std::string_view html);

// Builds the context for predicting steps[step_index] from the preceding
// steps. History html is elided oldest-first until the budget fits; if
// action and rationale text alone still overflow, whole entries are dropped
// oldest-first. The persona block and current page are never removed;
// BudgetTooSmall is thrown if they alone exceed the budget.
PromptContext build_context(std::span<const Step> steps, const Persona* persona,
                            std::size_t step_index, TokenBudget budget,
                            bool include_rationales = true);

}  // namespace shoprl
