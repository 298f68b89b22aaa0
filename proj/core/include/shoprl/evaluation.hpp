#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "shoprl/dataset.hpp"
#include "shoprl/examples.hpp"
#include "shoprl/metrics.hpp"
#include "shoprl/policy.hpp"

namespace shoprl {

// Greedy predictions on teacher-forced contexts, scored through the
// serialized output path.
std::vector<EvalRecord> predict_teacher_forced(const Policy& policy, const PolicyParams& params,
                                               std::span<const TrainingExample> examples);

// Greedy predictions where each step's history holds the model's own earlier
// actions and rationales instead of the gold ones. Pages stay as recorded.
std::vector<EvalRecord> predict_free_running(const Policy& policy, const PolicyParams& params,
                                             const Dataset& dataset, TokenBudget budget,
                                             Split split, double eval_fraction = 0.2);

// {"session_id": ..., "step_index": ..., "output": <raw text>} per line.
void write_predictions_jsonl(std::ostream& os, std::span<const EvalRecord> records);

// Joins a predictions file against the dataset's gold actions. Throws
// DatasetError on malformed lines or unknown (session, step) keys.
std::vector<EvalRecord> records_from_predictions(const Dataset& dataset, std::istream& is,
                                                 const std::string& source = "predictions");

}  // namespace shoprl
