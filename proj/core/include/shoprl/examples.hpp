#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "shoprl/context.hpp"
#include "shoprl/dataset.hpp"
#include "shoprl/policy.hpp"

namespace shoprl {

// One next-action prediction problem with precomputed policy features.
struct TrainingExample {
  std::string session_id;
  std::size_t step_index = 0;
  bool is_terminal = false;
  CandidateSet cands;
  Action gold = Action::terminate();
  std::optional<ActionTokenSeq> gold_seq;  // absent when gold is not expressible
  PromptFeatures feats;
  std::optional<Persona> persona;
};

enum class Split { kTrain, kEval, kAll };

// Deterministic split keyed on the session id, stable across ablations.
bool is_eval_session(const std::string& session_id, double eval_fraction);

// Teacher-forced examples: every step of every selected session, with the
// true history as context.
std::vector<TrainingExample> build_examples(const Dataset& dataset, const Policy& policy,
                                            TokenBudget budget, Split split,
                                            double eval_fraction = 0.2);

}  // namespace shoprl
