#include "pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "shoprl/rationale.hpp"

namespace shoprl::app {
namespace {

void write_file(const std::filesystem::path& path, const std::string& body) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << body;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

Policy make_policy(const RunConfig& config) {
  return Policy(config.features, TextVocabulary(query_vocabulary()));
}

Dataset load_or_generate(const RunConfig& config) {
  if (!config.dataset) return generate_dataset(config.generator);
  auto result = ingest_jsonl(*config.dataset / "sessions.jsonl", *config.dataset / "personas.jsonl");
  if (!result.issues.empty()) {
    const auto& first = result.issues.front();
    throw std::runtime_error(first.source + ":" + std::to_string(first.line) + ": invalid record '" +
                             first.id + "' (" + first.violation.rule + ")");
  }
  return std::move(result.dataset);
}

Corpus build_corpus(Dataset raw, const RunConfig& config, AblationMode ablation, const Policy& policy) {
  Corpus c;
  c.dataset = ablate(std::move(raw), ablation, config.seed);
  if (c.dataset.rationales_enabled) {
    c.dataset.sessions = augment_rationales(std::move(c.dataset.sessions), c.dataset.personas);
  }
  c.train = build_examples(c.dataset, policy, config.budget, Split::kTrain, config.eval_fraction);
  c.eval = build_examples(c.dataset, policy, config.budget, Split::kEval, config.eval_fraction);
  return c;
}

std::vector<EvalRecord> evaluate(const Corpus& corpus, const Policy& policy, const PolicyParams& params,
                                 const RunConfig& config) {
  if (config.eval.protocol == EvalProtocol::kFreeRunning) {
    return predict_free_running(policy, params, corpus.dataset, config.budget, config.eval.split,
                                config.eval_fraction);
  }
  switch (config.eval.split) {
    case Split::kTrain: return predict_teacher_forced(policy, params, corpus.train);
    case Split::kEval: return predict_teacher_forced(policy, params, corpus.eval);
    case Split::kAll: {
      auto out = predict_teacher_forced(policy, params, corpus.train);
      auto rest = predict_teacher_forced(policy, params, corpus.eval);
      out.insert(out.end(), rest.begin(), rest.end());
      return out;
    }
  }
  return {};
}

RegimeResult run_regime(const Corpus& corpus, const Policy& policy, const RunConfig& config,
                        TrainMode mode, std::optional<PolicyParams> init, const ProgressFn& progress) {
  TrainConfig tc = config.train;
  tc.mode = mode;
  if (!config.explicit_reward) tc.reward = default_reward(mode);
  RegimeResult r;
  auto on_epoch = [&](std::string_view phase, std::size_t epoch, const PolicyParams& params) {
    EpochRow row;
    row.phase = std::string(phase);
    row.epoch = epoch;
    row.report = compute_report(evaluate(corpus, policy, params, config));
    r.epochs.push_back(std::move(row));
  };
  r.training = train(policy, corpus.train, tc, std::move(init), progress, on_epoch);
  for (auto& row : r.epochs) {
    double loss = 0.0, reward = 0.0;
    std::size_t n = 0, n_reward = 0;
    for (const auto& m : r.training.log) {
      if (m.phase != row.phase || m.epoch != row.epoch) continue;
      loss += m.loss;
      ++n;
      if (m.mean_reward) {
        reward += *m.mean_reward;
        ++n_reward;
      }
    }
    if (n > 0) row.loss = loss / static_cast<double>(n);
    if (n_reward > 0) row.mean_reward = reward / static_cast<double>(n_reward);
  }
  r.records = evaluate(corpus, policy, r.training.params, config);
  r.report = compute_report(r.records);
  return r;
}

void write_metrics_csv(const std::filesystem::path& path, std::span<const MetricsRow> rows) {
  std::ostringstream os;
  os << "phase,epoch,batch,mean_reward,loss,kl,clip_fraction\n";
  auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
  for (const auto& r : rows) {
    os << r.phase << ',' << r.epoch << ',' << r.batch << ',' << opt(r.mean_reward) << ',' << num(r.loss)
       << ',' << opt(r.kl) << ',' << opt(r.clip_fraction) << '\n';
  }
  write_file(path, os.str());
}

void write_epochs_csv(const std::filesystem::path& path, std::span<const EpochRow> rows) {
  std::ostringstream os;
  os << "phase,epoch,mean_reward,loss,next_action_accuracy,action_type_macro_f1,fine_grained_accuracy,"
        "session_outcome_weighted_f1\n";
  for (const auto& r : rows) {
    const auto& m = r.report;
    os << r.phase << ',' << r.epoch << ',' << (r.mean_reward ? num(*r.mean_reward) : std::string()) << ','
       << num(r.loss) << ',' << num(m.next_action_accuracy) << ',' << num(m.action_type_macro_f1) << ','
       << num(m.fine_grained_accuracy) << ',' << num(m.session_outcome_weighted_f1) << '\n';
  }
  write_file(path, os.str());
}

void write_eval_outputs(const std::filesystem::path& dir, std::span<const EvalRecord> records,
                        const MetricsReport& report) {
  write_file(dir / "report.json", report.to_json().dump(2) + "\n");
  std::ostringstream per_type, dist, preds;
  write_count_csv(per_type, report.per_type_table, true);
  write_file(dir / "per_type.csv", per_type.str());
  const auto rows = distribution_report(records);
  write_count_csv(dist, rows, false);
  write_file(dir / "distribution.csv", dist.str());
  write_predictions_jsonl(preds, records);
  write_file(dir / "predictions.jsonl", preds.str());
}

}  // namespace shoprl::app
