#pragma once

#include "ngrc/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ngrc::cli {

struct ConfigOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> solver;
  std::vector<std::string> overrides;  // "key=value"
};

/// Defaults, then the config file, then --set overrides, then --seed and --solver.
[[nodiscard]] NgrcConfig resolve_config(const ConfigOptions& options);

struct SweepRun {
  double scale = 1.0;
  unsigned workers = 0;
  std::optional<std::filesystem::path> cache_dir;
  bool quiet = false;
};

int cmd_simulate(const NgrcConfig& config, const std::filesystem::path& out);
int cmd_train(const NgrcConfig& config, const std::filesystem::path& trajectory, const std::filesystem::path& out);
int cmd_forecast(const NgrcConfig& config, const std::filesystem::path& trajectory,
                 const std::filesystem::path& report, const std::filesystem::path& out);
int cmd_metrics(const NgrcConfig& config, const std::filesystem::path& truth, const std::filesystem::path& prediction,
                const std::optional<std::filesystem::path>& out);
int cmd_sweep(const std::filesystem::path& spec, const std::filesystem::path& out_dir, const SweepRun& run);
int cmd_reproduce(const std::string& figure_id, const std::filesystem::path& spec_dir,
                  const std::filesystem::path& out_dir, const SweepRun& run);

}  // namespace ngrc::cli
