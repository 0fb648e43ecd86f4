#pragma once

#include "vprisk_cli/config.hpp"

#include <cstddef>
#include <filesystem>

namespace vprisk::cli {

struct RunResult {
  std::size_t points = 0;
  std::size_t failed = 0;
};

/// Exit status for a finished run: 0 clean, 2 partial failure, 3 nothing succeeded.
int exit_code(const RunResult& result) noexcept;

/// Runs one subcommand and writes `out`, `out`.config.json and a text sidecar
/// (`out`.summary.txt, or `out`.diagnostics.txt for `profile`).
RunResult run_command(const ExperimentConfig& config, const std::filesystem::path& out, unsigned threads);

/// Interior grid points strictly above both neighbours.
std::size_t count_interior_maxima(const std::vector<double>& values);

}  // namespace vprisk::cli
