#pragma once

#include <filesystem>
#include <string>

#include "config.hpp"

namespace bargzero::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2 };

/// Each command reads its parameters from `cfg` (recording defaults) and
/// writes its files below `out`.
int cmd_solve(RunConfig& cfg, const std::filesystem::path& out);
int cmd_train(RunConfig& cfg, const std::filesystem::path& out);
int cmd_zeros(RunConfig& cfg, const std::filesystem::path& out);
int cmd_sweep(RunConfig& cfg, const std::filesystem::path& out);
int cmd_ablate(RunConfig& cfg, const std::filesystem::path& out);
int cmd_validate(RunConfig& cfg, const std::filesystem::path& out);

int run_command(const std::string& name, RunConfig& cfg, const std::filesystem::path& out);

}  // namespace bargzero::cli
