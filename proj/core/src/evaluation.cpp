#include "shoprl/evaluation.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

namespace shoprl {

std::vector<EvalRecord> predict_teacher_forced(const Policy& policy, const PolicyParams& params,
                                               std::span<const TrainingExample> examples) {
  std::vector<EvalRecord> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    const auto seq = policy.greedy(params, ex.feats);
    const auto decoded = policy.decode(seq, ex.cands, ex.persona ? &*ex.persona : nullptr);
    out.push_back(EvalRecord::from_raw(
        ex.gold, RawModelOutput{serialize_action_output(decoded.rationale, decoded.action)},
        ex.session_id, ex.step_index, ex.is_terminal));
  }
  return out;
}

std::vector<EvalRecord> predict_free_running(const Policy& policy, const PolicyParams& params,
                                             const Dataset& dataset, TokenBudget budget,
                                             Split split, double eval_fraction) {
  std::vector<EvalRecord> out;
  for (const auto& session : dataset.sessions) {
    if (split != Split::kAll &&
        is_eval_session(session.session_id, eval_fraction) != (split == Split::kEval)) {
      continue;
    }
    const Persona* persona = dataset.persona_for(session.user_id);
    std::vector<Step> rolled = session.steps;
    for (std::size_t t = 0; t < rolled.size(); ++t) {
      const auto ctx = build_context(rolled, persona, t, budget, dataset.rationales_enabled);
      const auto cands = extract_candidates(rolled[t].observation);
      const auto feats = policy.featurize(ctx, cands);
      const auto decoded = policy.decode(policy.greedy(params, feats), cands, persona);
      out.push_back(EvalRecord::from_raw(
          session.steps[t].action,
          RawModelOutput{serialize_action_output(decoded.rationale, decoded.action)},
          session.session_id, t, t + 1 == rolled.size()));
      rolled[t].action = decoded.action;
      rolled[t].rationale = Rationale{decoded.rationale, RationaleProvenance::kAugmented};
    }
  }
  return out;
}

void write_predictions_jsonl(std::ostream& os, std::span<const EvalRecord> records) {
  for (const auto& r : records) {
    nlohmann::ordered_json j = {
        {"session_id", r.session_id}, {"step_index", r.step_index}, {"output", r.raw_pred.text}};
    os << j.dump() << '\n';
  }
}

std::vector<EvalRecord> records_from_predictions(const Dataset& dataset, std::istream& is,
                                                 const std::string& source) {
  std::map<std::string, const Session*> by_id;
  for (const auto& s : dataset.sessions) by_id.emplace(s.session_id, &s);
  std::vector<EvalRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto id = j.at("session_id").get<std::string>();
      const auto step = j.at("step_index").get<std::size_t>();
      const auto it = by_id.find(id);
      if (it == by_id.end()) throw std::runtime_error("unknown session '" + id + "'");
      const auto& steps = it->second->steps;
      if (step >= steps.size()) throw std::runtime_error("step index out of range");
      out.push_back(EvalRecord::from_raw(steps[step].action,
                                         RawModelOutput{j.at("output").get<std::string>()}, id,
                                         step, step + 1 == steps.size()));
    } catch (const std::exception& e) {
      throw DatasetError(source, lineno, e.what());
    }
  }
  return out;
}

}  // namespace shoprl
