#pragma once
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "maxstab/config.hpp"

namespace maxstab {

enum ExitCode { kExitOk = 0, kExitError = 1, kExitUndecided = 2 };

struct RunRequest {
    std::string command;
    Json config;
    std::optional<std::uint64_t> seed;  // overrides config.seed
    std::filesystem::path base;         // directory the config was read from
    std::optional<std::filesystem::path> out;
};

// Validates, runs and writes evidence.csv, summary.json and charts/*.svg into
// the output directory. Errors surface as exceptions (ConfigError for schema
// problems); the return value is the exit status for completed runs.
int run(const RunRequest& req, std::ostream& log);

}  // namespace maxstab
