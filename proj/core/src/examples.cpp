#include "shoprl/examples.hpp"

#include "shoprl/checkpoint.hpp"

namespace shoprl {

bool is_eval_session(const std::string& session_id, double eval_fraction) {
  const auto digest = std::stoull(hex_digest(std::string_view(session_id)), nullptr, 16);
  return static_cast<double>(digest % 10000) < eval_fraction * 10000.0;
}

std::vector<TrainingExample> build_examples(const Dataset& dataset, const Policy& policy,
                                            TokenBudget budget, Split split,
                                            double eval_fraction) {
  std::vector<TrainingExample> out;
  for (const auto& session : dataset.sessions) {
    if (split != Split::kAll &&
        is_eval_session(session.session_id, eval_fraction) != (split == Split::kEval)) {
      continue;
    }
    const Persona* persona = dataset.persona_for(session.user_id);
    for (std::size_t t = 0; t < session.steps.size(); ++t) {
      const auto ctx = build_context(session.steps, persona, t, budget, dataset.rationales_enabled);
      TrainingExample ex;
      ex.session_id = session.session_id;
      ex.step_index = t;
      ex.is_terminal = t + 1 == session.steps.size();
      ex.cands = extract_candidates(session.steps[t].observation);
      ex.gold = session.steps[t].action;
      ex.gold_seq = policy.encode(ex.gold, ex.cands);
      ex.feats = policy.featurize(ctx, ex.cands);
      ex.persona = ctx.persona;
      out.push_back(std::move(ex));
    }
  }
  return out;
}

}  // namespace shoprl
