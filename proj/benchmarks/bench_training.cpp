#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "shoprl/examples.hpp"
#include "shoprl/generator.hpp"
#include "shoprl/trainer.hpp"

namespace {

using namespace shoprl;

struct Fixture {
  Policy policy{FeatureConfig{}, TextVocabulary(query_vocabulary())};
  std::vector<TrainingExample> examples;
  PolicyParams params;

  Fixture() {
    GeneratorSpec spec;
    spec.n_sessions = 40;
    spec.n_users = 10;
    examples = build_examples(generate_dataset(spec), policy, TokenBudget(), Split::kAll);
    params = policy.init_params(0.1, 1);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_Sample(benchmark::State& state) {
  const auto& f = fixture();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto& ex = f.examples[seed % f.examples.size()];
    benchmark::DoNotOptimize(f.policy.sample(f.params, ex.feats, 1.0, seed++));
  }
}
BENCHMARK(BM_Sample);

void BM_SftLoss(benchmark::State& state) {
  const auto& f = fixture();
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& ex = f.examples[i++ % f.examples.size()];
    if (!ex.gold_seq) continue;
    benchmark::DoNotOptimize(sft_loss(f.policy, f.params, ex.feats, *ex.gold_seq));
  }
}
BENCHMARK(BM_SftLoss);

void BM_CollectRollouts(benchmark::State& state) {
  const auto& f = fixture();
  GrpoConfig cfg;
  cfg.group_size = static_cast<std::size_t>(state.range(0));
  const auto reward = RewardSpec::sft_rl_v1();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto& ex = f.examples[seed % f.examples.size()];
    benchmark::DoNotOptimize(collect_rollouts(f.policy, f.params, ex, reward, cfg, seed++));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CollectRollouts)->Arg(8)->Arg(16);

void BM_GrpoLoss(benchmark::State& state) {
  const auto& f = fixture();
  GrpoConfig cfg;
  cfg.group_size = static_cast<std::size_t>(state.range(0));
  const auto& ex = f.examples.front();
  const auto group = collect_rollouts(f.policy, f.params, ex, RewardSpec::sft_rl_v1(), cfg, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(grpo_loss(f.policy, f.params, f.params, f.params, ex.feats, group, cfg));
  }
}
BENCHMARK(BM_GrpoLoss)->Arg(8)->Arg(16);

void BM_GroupAdvantages(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<double> r(static_cast<std::size_t>(state.range(0)));
  for (auto& x : r) x = static_cast<double>(rng() % 2001);
  for (auto _ : state) benchmark::DoNotOptimize(group_advantages(r, 1e-6));
}
BENCHMARK(BM_GroupAdvantages)->Arg(8)->Arg(64);

void BM_SftEpoch(benchmark::State& state) {
  const auto& f = fixture();
  TrainConfig cfg;
  cfg.mode = TrainMode::kSftOnly;
  cfg.sft.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train(f.policy, f.examples, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.examples.size()));
}
BENCHMARK(BM_SftEpoch)->Unit(benchmark::kMillisecond);

}  // namespace
