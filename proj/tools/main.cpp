#include <cstdlib>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("shoprl");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* level = std::getenv("SHOPRL_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }

  CLI::App app{"Persona-conditioned shopping agent: data generation, SFT/GRPO training, evaluation"};
  app.require_subcommand(1);
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  for (const char* name : {"gen-data", "train", "eval", "ablate"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory")->required();
    sub->add_option("--seed", seed, "Override the configuration seed");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : shoprl::app::kExitConfig;
  }
  return shoprl::app::run_command(app.get_subcommands().front()->get_name(), config, out, seed);
}
