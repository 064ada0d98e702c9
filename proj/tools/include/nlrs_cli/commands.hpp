#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nlrs_cli/config.hpp"

namespace nlrs::cli {

struct RunFlags {
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::filesystem::path> out;
    bool quiet = false;
};

const std::vector<std::string>& subcommand_names();

/// Applies command-line overrides to the parsed configuration.
RunConfig apply_flags(RunConfig config, const RunFlags& flags);

/// Runs one subcommand and writes its artifacts into config.out_dir.
/// Returns 0 iff every verdict passes, 1 on a failed verdict, 2 on an error
/// (error.json is written next to the other artifacts when possible).
int run_subcommand(const std::string& name, const RunConfig& config, bool quiet, std::ostream& log);

/// Machine-readable error record: {"command": ..., "error": ...}.
std::string error_json(const std::string& command, const std::string& message);

}  // namespace nlrs::cli
