#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "shoprl/context.hpp"
#include "shoprl/evaluation.hpp"
#include "shoprl/generator.hpp"
#include "shoprl/metrics.hpp"
#include "shoprl/reward.hpp"

namespace {

using namespace shoprl;

const Dataset& dataset() {
  static const Dataset d = [] {
    GeneratorSpec spec;
    spec.n_sessions = 60;
    spec.n_users = 12;
    return generate_dataset(spec);
  }();
  return d;
}

void BM_GenerateDataset(benchmark::State& state) {
  GeneratorSpec spec;
  spec.n_sessions = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_dataset(spec));
}
BENCHMARK(BM_GenerateDataset)->Arg(50)->Arg(527)->Unit(benchmark::kMillisecond);

void BM_BuildContext(benchmark::State& state) {
  const auto& d = dataset();
  const TokenBudget budget(static_cast<std::size_t>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& s = d.sessions[i++ % d.sessions.size()];
    benchmark::DoNotOptimize(build_context(s.steps, nullptr, s.steps.size() - 1, budget));
  }
}
BENCHMARK(BM_BuildContext)->Arg(TokenBudget::kSmall)->Arg(TokenBudget::kLarge);

void BM_CountTokens(benchmark::State& state) {
  const auto& html = dataset().sessions.front().steps.front().observation.html;
  for (auto _ : state) benchmark::DoNotOptimize(count_tokens(html));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(html.size()));
}
BENCHMARK(BM_CountTokens);

void BM_TotalReward(benchmark::State& state) {
  const auto spec = RewardSpec::sft_rl_v1();
  const auto gold = Action::click("review_link");
  const RawModelOutput raw{serialize_action_output("checking reviews", Action::click("review_link"))};
  for (auto _ : state) benchmark::DoNotOptimize(total_reward(raw, gold, spec));
}
BENCHMARK(BM_TotalReward);

void BM_ComputeReport(benchmark::State& state) {
  const auto& d = dataset();
  std::mt19937_64 rng(5);
  std::vector<EvalRecord> records;
  for (const auto& s : d.sessions) {
    for (std::size_t t = 0; t < s.steps.size(); ++t) {
      const auto pred = rng() % 2 ? s.steps[t].action : Action::terminate();
      records.push_back(EvalRecord::from_raw(s.steps[t].action, RawModelOutput{serialize_action_output("", pred)},
                                             s.session_id, t, t + 1 == s.steps.size()));
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(compute_report(records));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(records.size()));
}
BENCHMARK(BM_ComputeReport);

}  // namespace
