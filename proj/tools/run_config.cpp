#include "run_config.hpp"

#include <fstream>
#include <set>

#include "shoprl/checkpoint.hpp"

namespace shoprl::app {

RewardSpec default_reward(TrainMode mode) {
  return mode == TrainMode::kRlOnly ? RewardSpec::rl_only_v1() : RewardSpec::sft_rl_v1();
}

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

TokenBudget parse_budget(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "small") return TokenBudget(TokenBudget::kSmall);
    if (s == "large") return TokenBudget(TokenBudget::kLarge);
    throw ConfigError("budget must be \"small\", \"large\" or a token count");
  }
  if (!j.is_number_unsigned()) throw ConfigError("budget must be \"small\", \"large\" or a token count");
  return TokenBudget(j.get<std::size_t>());
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "eval") return Split::kEval;
  if (s == "all") return Split::kAll;
  throw ConfigError("unknown split '" + s + "'");
}

std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kEval: return "eval";
    case Split::kAll: return "all";
  }
  return "?";
}

void parse_train(const nlohmann::json& j, RunConfig& c) {
  check_keys(j, {"mode", "reward", "init_scale", "init_checkpoint", "sft", "grpo"}, "train");
  if (j.contains("mode")) c.train.mode = train_mode_from_string(j.at("mode").get<std::string>());
  c.explicit_reward = j.contains("reward");
  c.train.reward = c.explicit_reward ? RewardSpec::from_json(j.at("reward")) : default_reward(c.train.mode);
  if (j.contains("init_scale")) {
    c.train.init_scale = j.at("init_scale").get<double>();
    if (!(c.train.init_scale >= 0.0)) throw ConfigError("train.init_scale must be >= 0");
  }
  if (j.contains("init_checkpoint") && !j.at("init_checkpoint").get<std::string>().empty()) {
    c.init_checkpoint = j.at("init_checkpoint").get<std::string>();
  }
  if (j.contains("sft")) c.train.sft = SftConfig::from_json(j.at("sft"));
  if (j.contains("grpo")) c.train.grpo = GrpoConfig::from_json(j.at("grpo"));
}

void parse_eval(const nlohmann::json& j, RunConfig& c) {
  check_keys(j, {"checkpoint", "predictions", "protocol", "split"}, "eval");
  if (j.contains("checkpoint")) c.eval.checkpoint = j.at("checkpoint").get<std::string>();
  if (j.contains("predictions")) c.eval.predictions = j.at("predictions").get<std::string>();
  if (c.eval.checkpoint && c.eval.predictions) {
    throw ConfigError("eval: give either a checkpoint or a predictions file, not both");
  }
  if (j.contains("protocol")) {
    const auto p = j.at("protocol").get<std::string>();
    if (p == "teacher_forced") {
      c.eval.protocol = EvalProtocol::kTeacherForced;
    } else if (p == "free_running") {
      c.eval.protocol = EvalProtocol::kFreeRunning;
    } else {
      throw ConfigError("eval.protocol must be teacher_forced or free_running");
    }
  }
  if (j.contains("split")) c.eval.split = parse_split(j.at("split").get<std::string>());
}

void parse_ablate(const nlohmann::json& j, RunConfig& c) {
  check_keys(j, {"modes", "regimes"}, "ablate");
  if (j.contains("modes")) {
    c.ablate.modes.clear();
    for (const auto& m : j.at("modes")) c.ablate.modes.push_back(ablation_mode_from_string(m.get<std::string>()));
  }
  if (j.contains("regimes")) {
    c.ablate.regimes.clear();
    for (const auto& r : j.at("regimes")) c.ablate.regimes.push_back(train_mode_from_string(r.get<std::string>()));
  }
  if (c.ablate.modes.empty() || c.ablate.regimes.empty()) throw ConfigError("ablate: empty sweep");
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& j, std::optional<std::uint64_t> seed_override) {
  RunConfig c;
  try {
    check_keys(j,
               {"seed", "generator", "dataset", "budget", "eval_fraction", "features", "ablation", "train",
                "eval", "ablate"},
               "config");
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (seed_override) c.seed = *seed_override;
    nlohmann::json gen = j.value("generator", nlohmann::json::object());
    if (!gen.is_object()) throw ConfigError("generator: expected an object");
    if (!gen.contains("seed")) gen["seed"] = c.seed;
    c.generator = GeneratorSpec::from_json(gen);
    // An empty path, as written back into config.json, means "not set".
    if (j.contains("dataset") && !j.at("dataset").get<std::string>().empty()) {
      c.dataset = j.at("dataset").get<std::string>();
    }
    if (j.contains("budget")) c.budget = parse_budget(j.at("budget"));
    if (j.contains("eval_fraction")) {
      c.eval_fraction = j.at("eval_fraction").get<double>();
      if (!(c.eval_fraction > 0.0 && c.eval_fraction < 1.0)) throw ConfigError("eval_fraction must be in (0, 1)");
    }
    if (j.contains("features")) {
      const auto& f = j.at("features");
      check_keys(f, {"dim", "hash_seed", "use_persona", "normalize"}, "features");
      if (f.contains("dim")) c.features.dim = f.at("dim").get<std::size_t>();
      if (f.contains("hash_seed")) c.features.hash_seed = f.at("hash_seed").get<std::uint64_t>();
      if (f.contains("use_persona")) c.features.use_persona = f.at("use_persona").get<bool>();
      if (f.contains("normalize")) c.features.normalize = f.at("normalize").get<bool>();
      if (c.features.dim == 0) throw ConfigError("features.dim must be positive");
    }
    if (j.contains("ablation")) c.ablation = ablation_mode_from_string(j.at("ablation").get<std::string>());
    parse_train(j.value("train", nlohmann::json::object()), c);
    c.train.seed = c.seed;
    if (j.contains("eval")) parse_eval(j.at("eval"), c);
    if (j.contains("ablate")) parse_ablate(j.at("ablate"), c);
  } catch (const ConfigError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_run_config(j, seed_override);
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json modes = nlohmann::ordered_json::array();
  for (const auto m : ablate.modes) modes.push_back(to_string(m));
  nlohmann::ordered_json regimes = nlohmann::ordered_json::array();
  for (const auto r : ablate.regimes) regimes.push_back(to_string(r));
  nlohmann::ordered_json j = {
      {"seed", seed},
      {"generator", generator.to_json()},
      {"dataset", dataset ? dataset->string() : ""},
      {"budget", budget.max_tokens},
      {"eval_fraction", eval_fraction},
      {"features", {{"dim", features.dim}, {"hash_seed", features.hash_seed}, {"use_persona", features.use_persona},
                    {"normalize", features.normalize}}},
      {"ablation", to_string(ablation)},
      {"train",
       {{"mode", to_string(train.mode)},
        {"reward", train.reward.to_json()},
        {"init_scale", train.init_scale},
        {"init_checkpoint", init_checkpoint ? init_checkpoint->string() : ""},
        {"sft", train.sft.to_json()},
        {"grpo", train.grpo.to_json()}}},
      {"eval",
       {{"protocol", eval.protocol == EvalProtocol::kTeacherForced ? "teacher_forced" : "free_running"},
        {"split", split_name(eval.split)}}},
      {"ablate", {{"modes", modes}, {"regimes", regimes}}}};
  return j;
}

std::string RunConfig::hash() const { return hex_digest(to_json().dump()); }

}  // namespace shoprl::app
