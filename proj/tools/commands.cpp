#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "pipeline.hpp"
#include "shoprl/checkpoint.hpp"

namespace shoprl::app {
namespace {

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << body;
}

void print_summary(std::string_view label, const MetricsReport& r) {
  std::printf("%-28s acc=%.4f macro_f1=%.4f fine=%.4f outcome_f1=%.4f (n=%zu)\n",
              std::string(label).c_str(), r.next_action_accuracy, r.action_type_macro_f1,
              r.fine_grained_accuracy, r.session_outcome_weighted_f1, r.num_records);
}

ProgressFn log_progress() {
  return [](const MetricsRow& row) {
    if (row.phase == "rl") {
      spdlog::debug("rl epoch {} batch {} reward {:.3f} loss {:.5f} kl {:.5f} clip {:.3f}", row.epoch,
                    row.batch, row.mean_reward.value_or(0.0), row.loss, row.kl.value_or(0.0),
                    row.clip_fraction.value_or(0.0));
    } else {
      spdlog::debug("sft epoch {} batch {} loss {:.5f}", row.epoch, row.batch, row.loss);
    }
  };
}

PolicyParams load_params(const std::filesystem::path& path, const Policy& policy) {
  auto ckpt = load_checkpoint(path);
  if (ckpt.features.dim != policy.feature_config().dim ||
      ckpt.features.hash_seed != policy.feature_config().hash_seed ||
      ckpt.features.normalize != policy.feature_config().normalize ||
      ckpt.vocab != policy.vocab().terms()) {
    throw ConfigError(path.string() + ": checkpoint feature layout does not match the config");
  }
  return std::move(ckpt.params);
}

void write_outputs(const std::filesystem::path& out, const RunConfig& config, const Policy& policy,
                   const RegimeResult& r, TrainMode mode) {
  std::filesystem::create_directories(out);
  if (mode != TrainMode::kZeroShot) {
    save_checkpoint(out / "checkpoint.json",
                    Checkpoint{policy.feature_config(), policy.vocab().terms(), r.training.params,
                               config.hash()});
  }
  write_metrics_csv(out / "metrics.csv", r.training.log);
  write_epochs_csv(out / "epochs.csv", r.epochs);
  write_eval_outputs(out, r.records, r.report);
}

}  // namespace

void cmd_gen_data(const RunConfig& config, const std::filesystem::path& out) {
  const auto dataset = generate_dataset(config.generator);
  export_dataset(dataset, config.generator, out);
  std::printf("generated %zu sessions, %zu steps, %zu users -> %s\n", dataset.sessions.size(),
              dataset.num_steps(), dataset.personas.size(), out.string().c_str());
}

void cmd_train(const RunConfig& config, const std::filesystem::path& out) {
  const auto policy = make_policy(config);
  auto corpus = build_corpus(load_or_generate(config), config, config.ablation, policy);
  spdlog::info("corpus: {} train / {} eval examples", corpus.train.size(), corpus.eval.size());
  std::optional<PolicyParams> init;
  if (config.init_checkpoint) {
    init = load_params(*config.init_checkpoint, policy);
    spdlog::info("initialized from {} (params {})", config.init_checkpoint->string(), hex_digest(init->hash()));
  }
  const auto mode = config.train.mode;
  const auto r = run_regime(corpus, policy, config, mode, std::move(init), log_progress());
  write_text(out / "config.json", config.to_json().dump(2) + "\n");
  write_outputs(out, config, policy, r, mode);
  print_summary(to_string(mode), r.report);
}

void cmd_eval(const RunConfig& config, const std::filesystem::path& out) {
  const auto policy = make_policy(config);
  std::vector<EvalRecord> records;
  if (config.eval.predictions) {
    Corpus c;
    c.dataset = ablate(load_or_generate(config), config.ablation, config.seed);
    std::ifstream is(*config.eval.predictions);
    if (!is) throw std::runtime_error("cannot open " + config.eval.predictions->string());
    records = records_from_predictions(c.dataset, is, config.eval.predictions->string());
  } else if (config.eval.checkpoint) {
    const auto params = load_params(*config.eval.checkpoint, policy);
    const auto corpus = build_corpus(load_or_generate(config), config, config.ablation, policy);
    records = evaluate(corpus, policy, params, config);
  } else {
    throw ConfigError("eval needs eval.checkpoint or eval.predictions");
  }
  const auto report = compute_report(records);
  write_eval_outputs(out, records, report);
  print_summary("eval", report);
}

void cmd_ablate(const RunConfig& config, const std::filesystem::path& out) {
  const auto policy = make_policy(config);
  const auto raw = load_or_generate(config);
  std::ostringstream table;
  table << "ablation,regime,next_action_accuracy,action_type_macro_f1,fine_grained_accuracy,"
           "session_outcome_weighted_f1\n";
  for (const auto mode : config.ablate.modes) {
    const auto corpus = build_corpus(raw, config, mode, policy);
    for (const auto regime : config.ablate.regimes) {
      spdlog::info("ablation {} / {}", to_string(mode), to_string(regime));
      const auto r = run_regime(corpus, policy, config, regime, std::nullopt, log_progress());
      write_outputs(out / std::string(to_string(mode)) / std::string(to_string(regime)), config, policy, r,
                    regime);
      const auto& m = r.report;
      char line[256];
      std::snprintf(line, sizeof line, "%s,%s,%.6f,%.6f,%.6f,%.6f\n", std::string(to_string(mode)).c_str(),
                    std::string(to_string(regime)).c_str(), m.next_action_accuracy, m.action_type_macro_f1,
                    m.fine_grained_accuracy, m.session_outcome_weighted_f1);
      table << line;
      print_summary(std::string(to_string(mode)) + "/" + std::string(to_string(regime)), m);
    }
  }
  write_text(out / "ablation.csv", table.str());
}

int run_command(std::string_view command, const std::filesystem::path& config_path,
                const std::filesystem::path& out, std::optional<std::uint64_t> seed) {
  try {
    const auto config = load_run_config(config_path, seed);
    if (command == "gen-data") {
      cmd_gen_data(config, out);
    } else if (command == "train") {
      cmd_train(config, out);
    } else if (command == "eval") {
      cmd_eval(config, out);
    } else if (command == "ablate") {
      cmd_ablate(config, out);
    } else {
      spdlog::error("unknown command '{}'", command);
      return kExitConfig;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
}

}  // namespace shoprl::app
