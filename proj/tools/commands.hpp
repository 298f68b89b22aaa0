#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "run_config.hpp"

namespace shoprl::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

// Each command writes its outputs under `out` and throws on failure.
void cmd_gen_data(const RunConfig& config, const std::filesystem::path& out);
void cmd_train(const RunConfig& config, const std::filesystem::path& out);
void cmd_eval(const RunConfig& config, const std::filesystem::path& out);
void cmd_ablate(const RunConfig& config, const std::filesystem::path& out);

// Loads the config, dispatches and maps failures to exit codes.
int run_command(std::string_view command, const std::filesystem::path& config_path,
                const std::filesystem::path& out, std::optional<std::uint64_t> seed);

}  // namespace shoprl::app
