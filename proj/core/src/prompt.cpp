#include "shoprl/prompt.hpp"

namespace shoprl {

namespace {

constexpr std::string_view kTask = R"(<IMPORTANT>
Task: output the next step of the shopping session below.
Inputs: prior steps with their rationales where recorded, the page currently on screen, and a profile of the shopper.
Respect ordinary page mechanics; a query has to be typed into a box before a search can be submitted.
</IMPORTANT>

)";

constexpr std::string_view kActionSpace = R"(# Action Space

Three action types exist, each written as a JSON object.

#### 1. `input`:
Enter `text` into the field called `name`.
{
    "type": "input",
    "name": "input_name",
    "text": "input_text"
}

#### 2. `click`:
Press the element called `name`.
{
    "type": "click",
    "name": "clickable_name"
}

#### 3. `terminate`:
End the session with no purchase.
{
    "type": "terminate"
}

)";

constexpr std::string_view kRationale = R"(# Rationale
Each step may carry a short motive for the action. Motives are shown for earlier steps where recorded.

)";

constexpr std::string_view kContextHeader = R"(# Context
Steps are listed in order. Targets are addressed by the name="..." attribute in the page markup.

)";

constexpr std::string_view kPersonaHeader = R"(# Persona
Shopper profile. It is background only and may be irrelevant to this page. DO NOT RELY ON IT.

)";

constexpr std::string_view kOutputWithRationale = R"(# Output Format
Reply with the motive followed by the action:

{
    "rationale": "<rationale>",
    "action": {
        "type": "<type>",
        ...
    }
}

<IMPORTANT>
OUTPUT A SINGLE JSON OBJECT, NOTHING ELSE.
</IMPORTANT>
)";

constexpr std::string_view kOutputWithoutRationale = R"(# Output Format
Reply with the action and an empty motive:

{
    "rationale": "",
    "action": {
        "type": "<type>",
        ...
    }
}

<IMPORTANT>
OUTPUT A SINGLE JSON OBJECT, NOTHING ELSE.
</IMPORTANT>
)";

}  // namespace

std::string render_prompt(const PromptContext& ctx, bool include_rationale_instruction) {
  std::string out;
  out += kTask;
  out += kActionSpace;
  if (include_rationale_instruction) out += kRationale;
  out += kContextHeader;
  for (const auto& entry : ctx.history) {
    out += render_history_entry(entry);
    out += "\n";
  }
  out += render_current_page(ctx.current_html);
  out += "\n";
  if (ctx.persona_block) {
    out += kPersonaHeader;
    out += *ctx.persona_block;
    out += "\n";
  }
  out += include_rationale_instruction ? kOutputWithRationale : kOutputWithoutRationale;
  return out;
}

}  // namespace shoprl
