#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "storsim/io/config.hpp"

namespace storsim
{

struct RunOptions
{
    std::uint64_t seed = 1;
    std::string outDir;              // empty = no files written
    std::optional<bool> records;     // overrides config.output.records
};

/// Executes one simulation instance and returns its summary document.
/// When outDir is set the per-run files (summary.json, timeseries.csv,
/// costs.json, record streams) are written there.
nlohmann::ordered_json ExecuteRun(const ScenarioConfig& config, const RunOptions& options);

struct MultiRunOptions
{
    std::uint32_t runs = 1;
    std::uint64_t baseSeed = 1;
    std::string outRoot;             // empty = no files written
    std::optional<bool> records;
    unsigned parallelism = 0;        // 0 = hardware concurrency
};

/// Runs N independent instances (run i seeded baseSeed + i), writes
/// out/<run-NNN>/ outputs plus an aggregated summary, and returns
/// {"runs": [...], "aggregate": {...}}.
nlohmann::ordered_json ExecuteMultiRun(const ScenarioConfig& config, const MultiRunOptions& options);

} // namespace storsim
