#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dnas/evaluator.hpp"
#include "dnas/evolution.hpp"
#include "dnas/supernet_cache.hpp"

namespace dnas {

inline constexpr std::int64_t kKiB = 1024;
inline constexpr std::int64_t kMiB = 1024 * kKiB;

/// Memory budgets of three reference microcontrollers.
struct DevicePreset {
    std::string_view name;
    Constraints constraints;
};

inline constexpr std::array<DevicePreset, 3> kDevicePresets{{
    {"large", {512 * kKiB, 2 * kMiB}},  // STM32F765
    {"medium", {320 * kKiB, 1 * kMiB}}, // STM32F746
    {"small", {256 * kKiB, 1 * kMiB}},  // Arduino Nano 33 BLE Sense
}};

std::optional<DevicePreset> find_preset(std::string_view name);

/// Everything needed to reproduce a run from its artifacts.
struct RunSettings {
    SearchConfig search;
    std::string preset = "large";
    std::string evaluator = "surrogate";
    SurrogateParams surrogate{};
    ExternalBackendOptions external{};
    CacheOptions cache{};
    std::size_t fitness_window = 25;
};

nlohmann::ordered_json run_settings_to_json(const RunSettings& settings);

struct RunResult {
    SearchHistory history;
    CacheCounters counters;
    std::vector<SupernetState> supernets;
    bool interrupted = false;
};

/// Runs a search with the configured backend and writes history.jsonl, pareto.json, summary.json,
/// fitness_evolution.csv, cumulative_pareto.csv and timings.csv into `out_dir`.
/// history.jsonl is appended as evaluations complete so an interrupted run stays analyzable.
RunResult execute_run(const RunSettings& settings, const std::filesystem::path& out_dir, const SearchHooks& hooks = {});

/// Same as execute_run but with a caller-provided backend.
RunResult execute_run(const RunSettings& settings, Backend& backend, const std::filesystem::path& out_dir,
                      const SearchHooks& hooks = {});

/// Recomputes the analysis artifacts (all but history.jsonl and summary.json) from records.
void write_analysis_artifacts(const std::filesystem::path& out_dir, std::span<const EvaluatedCandidate> records,
                              std::size_t fitness_window);

/// Merges several history files and writes the global front to pareto.json and frontier.csv.
std::vector<EvaluatedCandidate> merge_pareto(std::span<const std::filesystem::path> histories,
                                             const std::filesystem::path& out_dir);

} // namespace dnas
