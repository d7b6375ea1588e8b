#include "dnas/artifacts.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "dnas/error.hpp"
#include "dnas/serialization.hpp"

namespace dnas {

using nlohmann::ordered_json;

ordered_json record_to_json(const EvaluatedCandidate& rec) {
    ordered_json j;
    j["eval_index"] = rec.eval_index;
    j["candidate"] = candidate_to_json(rec.candidate);
    j["ok"] = rec.ok();
    if (rec.ok()) {
        j["accuracy"] = rec.metrics->accuracy;
        j["precision"] = rec.metrics->precision;
        j["recall"] = rec.metrics->recall;
    }
    j["ram_bytes"] = rec.estimate.ram_bytes;
    j["flash_bytes"] = rec.estimate.flash_bytes;
    if (rec.ok()) {
        j["fitness"] = rec.fitness_value;
    } else {
        j["error"] = rec.error;
    }
    return j;
}

EvaluatedCandidate record_from_json(const ordered_json& j) {
    EvaluatedCandidate rec;
    try {
        rec.eval_index = j.at("eval_index").get<std::uint64_t>();
        rec.candidate = candidate_from_json(j.at("candidate"));
        rec.candidate.id = rec.eval_index;
        rec.estimate.ram_bytes = j.at("ram_bytes").get<std::int64_t>();
        rec.estimate.flash_bytes = j.at("flash_bytes").get<std::int64_t>();
        if (j.at("ok").get<bool>()) {
            rec.metrics = EvalMetrics{j.at("accuracy").get<double>(), j.at("precision").get<double>(),
                                      j.at("recall").get<double>()};
            rec.fitness_value = j.at("fitness").get<double>();
        } else {
            rec.error = j.value("error", std::string("evaluation failed"));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed history record: ") + e.what());
    } catch (const InvalidCandidateError& e) {
        throw Error(std::string("malformed history record: ") + e.what());
    }
    return rec;
}

void append_history_line(std::ostream& os, const EvaluatedCandidate& rec) { os << record_to_json(rec).dump() << '\n'; }

void write_history_jsonl(std::ostream& os, std::span<const EvaluatedCandidate> records) {
    for (const auto& r : records) append_history_line(os, r);
}

std::vector<EvaluatedCandidate> read_history_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read history file " + path.string());
    std::vector<EvaluatedCandidate> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(record_from_json(ordered_json::parse(line)));
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (out.empty()) throw Error("history file " + path.string() + " contains no records");
    return out;
}

std::string pareto_json(std::span<const EvaluatedCandidate> front) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : front) arr.push_back(record_to_json(r));
    return arr.dump(2) + "\n";
}

namespace {

void write_series(std::ostream& os, const char* header, std::span<const std::pair<std::uint64_t, double>> series) {
    os << header << '\n';
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& [index, value] : series) os << index << ',' << value << '\n';
}

} // namespace

void write_fitness_evolution_csv(std::ostream& os, std::span<const std::pair<std::uint64_t, double>> series) {
    write_series(os, "eval_index,mean_fitness", series);
}

void write_cumulative_pareto_csv(std::ostream& os, std::span<const std::pair<std::uint64_t, double>> series) {
    write_series(os, "eval_index,pareto_fraction", series);
}

void write_timings_csv(std::ostream& os, std::span<const EvaluatedCandidate> records) {
    os << "eval_index,wall_time_s\n" << std::setprecision(9);
    for (const auto& r : records) os << r.eval_index << ',' << r.wall_time << '\n';
}

void write_frontier_csv(std::ostream& os, std::span<const EvaluatedCandidate> front, std::span<const std::string> source) {
    os << "source,eval_index,accuracy,ram_bytes,flash_bytes,resolution,color,b3,b4,b5,b6,b7,alpha\n";
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < front.size(); ++i) {
        const auto& r = front[i];
        const auto& c = r.candidate;
        os << (i < source.size() ? source[i] : std::string()) << ',' << r.eval_index << ',' << r.accuracy() << ','
           << r.estimate.ram_bytes << ',' << r.estimate.flash_bytes << ',' << c.data.resolution << ','
           << to_string(c.data.color);
        for (int d : c.model.depths) os << ',' << d;
        os << ',' << c.model.alpha.value() << '\n';
    }
}

ordered_json search_config_to_json(const SearchConfig& c) {
    ordered_json j;
    j["population_size"] = c.population_size;
    j["tournament_size"] = c.tournament_size;
    j["crossover_rate"] = c.crossover_rate;
    j["mutation_rate"] = c.mutation_rate;
    j["budget_evals"] = c.budget.max_evaluations ? ordered_json(*c.budget.max_evaluations) : ordered_json(nullptr);
    j["budget_seconds"] = c.budget.max_seconds ? ordered_json(*c.budget.max_seconds) : ordered_json(nullptr);
    j["seed"] = c.seed;
    j["max_ram"] = c.constraints.max_ram;
    j["max_flash"] = c.constraints.max_flash;
    j["weights"] = c.weights.w;
    j["dtype_bytes"] = {{"data", c.dtype.data.bytes_per_element},
                        {"activation", c.dtype.activation.bytes_per_element},
                        {"parameter", c.dtype.parameter.bytes_per_element}};
    j["flash_overhead"] = c.flash_overhead;
    j["hardware_aware"] = c.locks.frozen_data();
    j["fixed_resolution"] = c.locks.resolution ? ordered_json(*c.locks.resolution) : ordered_json(nullptr);
    j["fixed_color"] = c.locks.color ? ordered_json(std::string(to_string(*c.locks.color))) : ordered_json(nullptr);
    j["initial_concurrency"] = c.initial_concurrency;
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << contents;
    if (!out) throw Error("failed writing " + path.string());
}

} // namespace dnas
