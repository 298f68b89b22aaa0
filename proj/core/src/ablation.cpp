#include "shoprl/ablation.hpp"

#include <random>
#include <string>

namespace shoprl {

std::string_view to_string(AblationMode mode) {
  switch (mode) {
    case AblationMode::kFull: return "full";
    case AblationMode::kNoPersona: return "no_persona";
    case AblationMode::kShufflePersona: return "shuffle_persona";
    case AblationMode::kNoRationale: return "no_rationale";
  }
  return "?";
}

AblationMode ablation_mode_from_string(std::string_view name) {
  for (const auto m : {AblationMode::kFull, AblationMode::kNoPersona, AblationMode::kShufflePersona,
                       AblationMode::kNoRationale}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown ablation '" + std::string(name) + "'");
}

std::vector<std::size_t> random_derangement(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw DerangementImpossible("a derangement needs at least two users");
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

Dataset ablate(Dataset dataset, AblationMode mode, std::uint64_t seed) {
  switch (mode) {
    case AblationMode::kFull:
      break;
    case AblationMode::kNoPersona:
      dataset.personas.clear();
      break;
    case AblationMode::kShufflePersona: {
      const auto perm = random_derangement(dataset.personas.size(), seed);
      std::vector<Persona> shuffled;
      for (std::size_t i = 0; i < perm.size(); ++i) {
        Persona p = dataset.personas[perm[i]];
        p.user_id = dataset.personas[i].user_id;
        shuffled.push_back(std::move(p));
      }
      dataset.personas = std::move(shuffled);
      break;
    }
    case AblationMode::kNoRationale:
      for (auto& s : dataset.sessions) {
        for (auto& step : s.steps) step.rationale.reset();
      }
      dataset.rationales_enabled = false;
      break;
  }
  return dataset;
}

}  // namespace shoprl
