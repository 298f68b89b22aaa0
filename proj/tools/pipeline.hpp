#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "run_config.hpp"
#include "shoprl/dataset.hpp"
#include "shoprl/evaluation.hpp"
#include "shoprl/metrics.hpp"
#include "shoprl/policy.hpp"
#include "shoprl/trainer.hpp"

namespace shoprl::app {

// A dataset after ablation and rationale augmentation, with its
// teacher-forced examples split into train and eval.
struct Corpus {
  Dataset dataset;
  std::vector<TrainingExample> train;
  std::vector<TrainingExample> eval;
};

// Mean training signals of one epoch plus eval metrics at its end.
struct EpochRow {
  std::string phase;
  std::size_t epoch = 0;
  std::optional<double> mean_reward;
  double loss = 0.0;
  MetricsReport report;
};

struct RegimeResult {
  TrainResult training;
  std::vector<EpochRow> epochs;
  std::vector<EvalRecord> records;
  MetricsReport report;
};

Policy make_policy(const RunConfig& config);

// Reads config.dataset, or generates the corpus from config.generator.
Dataset load_or_generate(const RunConfig& config);

Corpus build_corpus(Dataset raw, const RunConfig& config, AblationMode ablation, const Policy& policy);

std::vector<EvalRecord> evaluate(const Corpus& corpus, const Policy& policy, const PolicyParams& params,
                                 const RunConfig& config);

// Trains with `mode` on corpus.train (zero-shot keeps the initial params) and
// evaluates on the configured split.
RegimeResult run_regime(const Corpus& corpus, const Policy& policy, const RunConfig& config,
                        TrainMode mode, std::optional<PolicyParams> init = std::nullopt,
                        const ProgressFn& progress = {});

void write_metrics_csv(const std::filesystem::path& path, std::span<const MetricsRow> rows);
void write_epochs_csv(const std::filesystem::path& path, std::span<const EpochRow> rows);

// report.json, per_type.csv, distribution.csv and predictions.jsonl.
void write_eval_outputs(const std::filesystem::path& dir, std::span<const EvalRecord> records,
                        const MetricsReport& report);

}  // namespace shoprl::app
