#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dnas/evolution.hpp"

namespace dnas {

nlohmann::ordered_json record_to_json(const EvaluatedCandidate& rec);
/// Throws Error on malformed input.
EvaluatedCandidate record_from_json(const nlohmann::ordered_json& j);

/// One record per line. wall_time is not written, which keeps the file byte-reproducible.
void write_history_jsonl(std::ostream& os, std::span<const EvaluatedCandidate> records);
void append_history_line(std::ostream& os, const EvaluatedCandidate& rec);
/// Throws Error naming the file when it is unreadable, malformed or holds no records.
std::vector<EvaluatedCandidate> read_history_jsonl(const std::filesystem::path& path);

/// Serialized Pareto front (array of full records), as written to pareto.json.
std::string pareto_json(std::span<const EvaluatedCandidate> front);

void write_fitness_evolution_csv(std::ostream& os, std::span<const std::pair<std::uint64_t, double>> series);
void write_cumulative_pareto_csv(std::ostream& os, std::span<const std::pair<std::uint64_t, double>> series);
void write_timings_csv(std::ostream& os, std::span<const EvaluatedCandidate> records);

/// Plot-ready accuracy vs RAM/flash table of a front. `source` labels each row with its input file.
void write_frontier_csv(std::ostream& os, std::span<const EvaluatedCandidate> front,
                        std::span<const std::string> source = {});

nlohmann::ordered_json search_config_to_json(const SearchConfig& config);

void write_text_file(const std::filesystem::path& path, const std::string& contents);

} // namespace dnas
