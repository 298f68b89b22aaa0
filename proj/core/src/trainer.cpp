#include "shoprl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

namespace shoprl {
namespace {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const char* what) {
  if (!j.is_object()) throw InvalidConfig(std::string(what) + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw InvalidConfig(std::string(what) + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::vector<double> log_softmax(const std::vector<double>& logits) {
  const double lse = log_sum_exp(logits);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit draw so the order is library independent.
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

}  // namespace

void SftConfig::validate() const {
  if (epochs == 0) throw InvalidConfig("sft.epochs must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidConfig("sft.learning_rate must be positive");
  }
  if (batch_size == 0) throw InvalidConfig("sft.batch_size must be positive");
}

SftConfig SftConfig::from_json(const nlohmann::json& j) {
  check_keys(j, {"epochs", "learning_rate", "batch_size"}, "sft");
  SftConfig c;
  read(j, "epochs", c.epochs);
  read(j, "learning_rate", c.learning_rate);
  read(j, "batch_size", c.batch_size);
  c.validate();
  return c;
}

nlohmann::json SftConfig::to_json() const {
  return {{"epochs", epochs}, {"learning_rate", learning_rate}, {"batch_size", batch_size}};
}

void GrpoConfig::validate() const {
  if (group_size < 2) throw InvalidConfig("grpo.group_size must be at least 2");
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) {
    throw InvalidConfig("grpo.clip_epsilon must be in (0, 1)");
  }
  if (!(kl_coef >= 0.0) || !std::isfinite(kl_coef)) throw InvalidConfig("grpo.kl_coef must be >= 0");
  if (!(adv_delta > 0.0)) throw InvalidConfig("grpo.adv_delta must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidConfig("grpo.learning_rate must be positive");
  }
  if (batch_size == 0) throw InvalidConfig("grpo.batch_size must be positive");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InvalidConfig("grpo.temperature must be positive");
  }
  if (inner_updates == 0) throw InvalidConfig("grpo.inner_updates must be positive");
}

GrpoConfig GrpoConfig::from_json(const nlohmann::json& j) {
  check_keys(j,
             {"group_size", "clip_epsilon", "kl_coef", "adv_delta", "learning_rate", "batch_size",
              "epochs", "temperature", "inner_updates", "ref_refresh_epochs"},
             "grpo");
  GrpoConfig c;
  read(j, "group_size", c.group_size);
  read(j, "clip_epsilon", c.clip_epsilon);
  read(j, "kl_coef", c.kl_coef);
  read(j, "adv_delta", c.adv_delta);
  read(j, "learning_rate", c.learning_rate);
  read(j, "batch_size", c.batch_size);
  read(j, "epochs", c.epochs);
  read(j, "temperature", c.temperature);
  read(j, "inner_updates", c.inner_updates);
  read(j, "ref_refresh_epochs", c.ref_refresh_epochs);
  c.validate();
  return c;
}

nlohmann::json GrpoConfig::to_json() const {
  return {{"group_size", group_size},       {"clip_epsilon", clip_epsilon},
          {"kl_coef", kl_coef},             {"adv_delta", adv_delta},
          {"learning_rate", learning_rate}, {"batch_size", batch_size},
          {"epochs", epochs},               {"temperature", temperature},
          {"inner_updates", inner_updates}, {"ref_refresh_epochs", ref_refresh_epochs}};
}

LossAndGrad sft_loss(const Policy& policy, const PolicyParams& params, const PromptFeatures& feats,
                     const ActionTokenSeq& gold) {
  LossAndGrad out{0.0, PolicyParams(params.feature_dim(), params.text_rows())};
  const auto factors = policy.unroll(params, feats, gold);
  const double w = 1.0 / static_cast<double>(factors.size());
  for (const auto& f : factors) {
    out.loss -= w * f.log_prob();
    auto d = f.probabilities();
    d[static_cast<std::size_t>(f.chosen)] -= 1.0;
    for (auto& x : d) x *= w;
    policy.backprop(f, d, out.grad);
  }
  return out;
}

std::vector<double> group_advantages(std::span<const double> rewards, double delta) {
  std::vector<double> adv(rewards.size(), 0.0);
  if (rewards.empty()) return adv;
  const double n = static_cast<double>(rewards.size());
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double var = 0.0;
  bool spread = false;
  for (const double r : rewards) {
    var += (r - mean) * (r - mean);
    spread = spread || r != rewards.front();
  }
  if (!spread) return adv;
  const double sd = std::sqrt(var / n);
  for (std::size_t i = 0; i < rewards.size(); ++i) adv[i] = (rewards[i] - mean) / (sd + delta);
  return adv;
}

RolloutGroup collect_rollouts(const Policy& policy, const PolicyParams& params_old,
                              const TrainingExample& example, const RewardSpec& reward,
                              const GrpoConfig& config, std::uint64_t seed) {
  RolloutGroup group;
  group.params_old_hash = params_old.hash();
  std::vector<double> rewards;
  const Persona* persona = example.persona ? &*example.persona : nullptr;
  for (std::size_t i = 0; i < config.group_size; ++i) {
    auto s = policy.sample(params_old, example.feats, config.temperature, mix_seed(seed, i));
    const auto decoded = policy.decode(s.seq, example.cands, persona);
    const RawModelOutput raw{serialize_action_output(decoded.rationale, decoded.action)};
    const double r = total_reward(raw, example.gold, reward).total;
    rewards.push_back(r);
    group.samples.push_back({std::move(s.seq), std::move(s.log_probs), r});
  }
  group.advantages = group_advantages(rewards, config.adv_delta);
  return group;
}

GrpoLoss grpo_loss(const Policy& policy, const PolicyParams& params,
                   const PolicyParams& params_old, const PolicyParams& params_ref,
                   const PromptFeatures& feats, const RolloutGroup& group,
                   const GrpoConfig& config) {
  if (params_old.hash() != group.params_old_hash) {
    throw StaleRollout("rollout group was sampled from a different policy snapshot");
  }
  if (group.advantages.size() != group.samples.size()) {
    throw std::invalid_argument("rollout group is missing advantages");
  }
  GrpoLoss out;
  out.grad = PolicyParams(params.feature_dim(), params.text_rows());
  const double g = static_cast<double>(group.samples.size());
  const double lo = 1.0 - config.clip_epsilon;
  const double hi = 1.0 + config.clip_epsilon;
  std::size_t clipped = 0;

  for (std::size_t i = 0; i < group.samples.size(); ++i) {
    const auto& sample = group.samples[i];
    const double a = group.advantages[i];
    const auto cur = policy.unroll(params, feats, sample.seq);
    const auto ref = policy.unroll(params_ref, feats, sample.seq);
    if (sample.old_log_probs.size() != cur.size()) {
      throw std::invalid_argument("old log-probs do not match the sampled sequence");
    }
    const double w = 1.0 / (g * static_cast<double>(cur.size()));
    for (std::size_t t = 0; t < cur.size(); ++t) {
      const auto& f = cur[t];
      const auto logp = log_softmax(f.logits);
      const auto logq = log_softmax(ref[t].logits);
      std::vector<double> d(f.logits.size(), 0.0);

      const double ratio = std::exp(logp[static_cast<std::size_t>(f.chosen)] - sample.old_log_probs[t]);
      const double clamped = std::clamp(ratio, lo, hi);
      out.surrogate += w * std::min(ratio * a, clamped * a);
      const bool cut = (a > 0.0 && ratio > hi) || (a < 0.0 && ratio < lo);
      if (cut) {
        ++clipped;
      } else if (a != 0.0) {
        for (std::size_t o = 0; o < d.size(); ++o) {
          const double p = std::isfinite(logp[o]) ? std::exp(logp[o]) : 0.0;
          const double onehot = static_cast<int>(o) == f.chosen ? 1.0 : 0.0;
          d[o] -= w * a * ratio * (onehot - p);
        }
      }

      double kl = 0.0;
      for (std::size_t o = 0; o < d.size(); ++o) {
        if (std::isfinite(logp[o])) kl += std::exp(logp[o]) * (logp[o] - logq[o]);
      }
      out.kl += w * kl;
      if (config.kl_coef != 0.0) {
        for (std::size_t o = 0; o < d.size(); ++o) {
          if (!std::isfinite(logp[o])) continue;
          d[o] += config.kl_coef * w * std::exp(logp[o]) * (logp[o] - logq[o] - kl);
        }
      }
      policy.backprop(f, d, out.grad);
      ++out.tokens;
    }
  }
  out.loss = -out.surrogate + config.kl_coef * out.kl;
  out.clip_fraction =
      out.tokens == 0 ? 0.0 : static_cast<double>(clipped) / static_cast<double>(out.tokens);
  return out;
}

std::string_view to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::kZeroShot: return "zero_shot";
    case TrainMode::kSftOnly: return "sft";
    case TrainMode::kRlOnly: return "rl";
    case TrainMode::kSftThenRl: return "sft_rl";
  }
  return "?";
}

TrainMode train_mode_from_string(std::string_view name) {
  if (name == "zero_shot") return TrainMode::kZeroShot;
  if (name == "sft") return TrainMode::kSftOnly;
  if (name == "rl") return TrainMode::kRlOnly;
  if (name == "sft_rl") return TrainMode::kSftThenRl;
  throw InvalidConfig("unknown training mode '" + std::string(name) + "'");
}

namespace {

void run_sft(const Policy& policy, std::span<const TrainingExample> examples,
             const TrainConfig& config, PolicyParams& params, std::vector<MetricsRow>& log,
             const ProgressFn& progress, const EpochFn& on_epoch) {
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (examples[i].gold_seq) usable.push_back(i);
  }
  const auto& c = config.sft;
  for (std::size_t epoch = 0; epoch < c.epochs; ++epoch) {
    const auto order = shuffled_order(usable.size(), mix_seed(config.seed, 0x5f7 + epoch));
    std::size_t batch = 0;
    for (std::size_t start = 0; start < order.size(); start += c.batch_size, ++batch) {
      const std::size_t end = std::min(order.size(), start + c.batch_size);
      PolicyParams grad(params.feature_dim(), params.text_rows());
      double loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const auto& ex = examples[usable[order[k]]];
        auto lg = sft_loss(policy, params, ex.feats, *ex.gold_seq);
        loss += lg.loss;
        grad.axpy(1.0, lg.grad);
      }
      const double n = static_cast<double>(end - start);
      params.axpy(-c.learning_rate / n, grad);
      MetricsRow row{"sft", epoch, batch, std::nullopt, loss / n, std::nullopt, std::nullopt};
      if (progress) progress(row);
      log.push_back(std::move(row));
    }
    if (on_epoch) on_epoch("sft", epoch, params);
  }
}

void run_grpo(const Policy& policy, std::span<const TrainingExample> examples,
              const TrainConfig& config, PolicyParams& params, std::vector<MetricsRow>& log,
              const ProgressFn& progress, const EpochFn& on_epoch) {
  const auto& c = config.grpo;
  PolicyParams ref = params;
  for (std::size_t epoch = 0; epoch < c.epochs; ++epoch) {
    if (c.ref_refresh_epochs > 0 && epoch > 0 && epoch % c.ref_refresh_epochs == 0) ref = params;
    const auto order = shuffled_order(examples.size(), mix_seed(config.seed, 0x91f0 + epoch));
    std::size_t batch = 0;
    for (std::size_t start = 0; start < order.size(); start += c.batch_size, ++batch) {
      const std::size_t end = std::min(order.size(), start + c.batch_size);
      const PolicyParams old = params;
      std::vector<RolloutGroup> groups;
      double reward_sum = 0.0;
      std::size_t reward_n = 0;
      for (std::size_t k = start; k < end; ++k) {
        const auto seed = mix_seed(mix_seed(config.seed, epoch), mix_seed(batch, k));
        groups.push_back(collect_rollouts(policy, old, examples[order[k]], config.reward, c, seed));
        for (const auto& s : groups.back().samples) {
          reward_sum += s.reward;
          ++reward_n;
        }
      }
      const double n = static_cast<double>(end - start);
      double first_loss = 0.0, first_kl = 0.0, last_clip = 0.0;
      for (std::size_t u = 0; u < c.inner_updates; ++u) {
        PolicyParams grad(params.feature_dim(), params.text_rows());
        double loss = 0.0, kl = 0.0, clip = 0.0;
        for (std::size_t k = start; k < end; ++k) {
          const auto gl = grpo_loss(policy, params, old, ref, examples[order[k]].feats,
                                    groups[k - start], c);
          loss += gl.loss;
          kl += gl.kl;
          if (gl.kl < -1e-12) throw NegativeKl("negative KL " + std::to_string(gl.kl));
          clip += gl.clip_fraction;
          grad.axpy(1.0, gl.grad);
        }
        params.axpy(-c.learning_rate / n, grad);
        if (u == 0) {
          first_loss = loss / n;
          first_kl = kl / n;
        }
        last_clip = clip / n;
      }
      MetricsRow row{"rl",     epoch,    batch, reward_sum / static_cast<double>(reward_n),
                     first_loss, first_kl, last_clip};
      if (progress) progress(row);
      log.push_back(std::move(row));
    }
    if (on_epoch) on_epoch("rl", epoch, params);
  }
}

}  // namespace

TrainResult train(const Policy& policy, std::span<const TrainingExample> examples,
                  const TrainConfig& config, std::optional<PolicyParams> init,
                  const ProgressFn& progress, const EpochFn& on_epoch) {
  config.sft.validate();
  config.grpo.validate();
  TrainResult result;
  const bool resumed = init.has_value();
  result.params = resumed ? std::move(*init) : policy.init_params(config.init_scale, config.seed);
  const bool do_sft = config.mode == TrainMode::kSftOnly ||
                      (config.mode == TrainMode::kSftThenRl && !resumed);
  const bool do_rl = config.mode == TrainMode::kRlOnly || config.mode == TrainMode::kSftThenRl;
  if (do_sft) run_sft(policy, examples, config, result.params, result.log, progress, on_epoch);
  if (do_rl) run_grpo(policy, examples, config, result.params, result.log, progress, on_epoch);
  return result;
}

}  // namespace shoprl
