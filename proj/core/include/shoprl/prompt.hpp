#pragma once

#include <string>
#include <string_view>

#include "shoprl/context.hpp"

namespace shoprl {

inline constexpr std::string_view kPromptVersion = "prompt_v1";

// Deterministic prompt text: task instructions, action space, rationale
// instructions (optional), context, persona (iff present) and the output
// contract. The dynamic parts are exactly the blocks counted in
// ctx.token_count, so count_tokens(render_prompt(ctx, f)) - ctx.token_count
// depends only on f and on whether a persona block is present.
std::string render_prompt(const PromptContext& ctx, bool include_rationale_instruction);

}  // namespace shoprl
