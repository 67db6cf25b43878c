#pragma once

#include "hma/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace hma::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_validation = 2,
    exit_convergence = 3,
    exit_io = 4,
    exit_hypothesis = 5,  // e.g. contraction certificate >= 1
};

struct RunOptions {
    std::filesystem::path out = "out";
    int workers = 1;
    bool deterministic = false;
};

const std::vector<std::string>& command_names();

/// Runs one command, writing its outputs plus report.kv and manifest.kv into
/// options.out. Never throws; returns the exit code.
int run(std::string_view command, const RunConfig& config, const RunOptions& options, std::ostream& log);

std::string sha256_hex(std::string_view bytes);

/// Writes via a temporary file in the same directory and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace hma::cli
