#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "shoprl/policy.hpp"

namespace shoprl {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  FeatureConfig features;
  std::vector<std::string> vocab;
  PolicyParams params;
  std::string config_hash;
};

// 16 hex digits of FNV-1a over the bytes.
std::string hex_digest(std::string_view bytes);
std::string hex_digest(std::uint64_t value);

nlohmann::json checkpoint_to_json(const Checkpoint& ckpt);
// Throws std::runtime_error on a format or version mismatch.
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace shoprl
