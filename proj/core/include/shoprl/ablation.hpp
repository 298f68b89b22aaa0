#pragma once

#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "shoprl/dataset.hpp"

namespace shoprl {

class DerangementImpossible : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class AblationMode { kFull, kNoPersona, kShufflePersona, kNoRationale };

std::string_view to_string(AblationMode mode);
AblationMode ablation_mode_from_string(std::string_view name);

// A uniformly drawn cyclic permutation of 0..n-1 (Sattolo), which has no
// fixed point. Throws DerangementImpossible for n < 2.
std::vector<std::size_t> random_derangement(std::size_t n, std::uint64_t seed);

// kNoPersona empties the persona table; kShufflePersona reassigns persona
// contents along a seeded derangement of users; kNoRationale strips all
// rationales and disables them in prompts. kFull is the identity.
Dataset ablate(Dataset dataset, AblationMode mode, std::uint64_t seed);

}  // namespace shoprl
