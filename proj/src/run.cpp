#include "dnas/run.hpp"

#include <fstream>
#include <sstream>

#include "dnas/artifacts.hpp"
#include "dnas/error.hpp"
#include "dnas/serialization.hpp"

namespace dnas {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::optional<DevicePreset> find_preset(std::string_view name) {
    for (const auto& p : kDevicePresets)
        if (p.name == name) return p;
    return std::nullopt;
}

ordered_json run_settings_to_json(const RunSettings& s) {
    ordered_json j;
    j["preset"] = s.preset;
    j["evaluator"] = s.evaluator;
    j["search"] = search_config_to_json(s.search);
    j["surrogate"] = {{"bias", s.surrogate.bias},
                      {"resolution", s.surrogate.resolution},
                      {"width", s.surrogate.width},
                      {"depth", s.surrogate.depth},
                      {"rgb", s.surrogate.rgb},
                      {"noise_amplitude", s.surrogate.noise_amplitude},
                      {"seed", s.surrogate.seed}};
    j["external"] = {{"command", s.external.command},
                     {"pretrain_timeout_ms", s.external.pretrain_timeout.count()},
                     {"evaluate_timeout_ms", s.external.evaluate_timeout.count()}};
    j["pretrain_steps"] = s.cache.pretrain_steps;
    j["finetune_steps"] = s.cache.finetune_steps;
    j["max_concurrent_evaluations"] = s.cache.max_concurrent_evaluations;
    j["fitness_window"] = s.fitness_window;
    return j;
}

void write_analysis_artifacts(const fs::path& out_dir, std::span<const EvaluatedCandidate> records,
                              std::size_t fitness_window) {
    write_text_file(out_dir / "pareto.json", pareto_json(pareto_front(records)));
    {
        std::ostringstream os;
        write_fitness_evolution_csv(os, fitness_evolution(records, fitness_window));
        write_text_file(out_dir / "fitness_evolution.csv", os.str());
    }
    {
        std::ostringstream os;
        write_cumulative_pareto_csv(os, cumulative_pareto_fraction(records));
        write_text_file(out_dir / "cumulative_pareto.csv", os.str());
    }
    {
        std::ostringstream os;
        write_timings_csv(os, records);
        write_text_file(out_dir / "timings.csv", os.str());
    }
}

RunResult execute_run(const RunSettings& settings, const fs::path& out_dir, const SearchHooks& hooks) {
    auto backend = make_backend(settings.evaluator, settings.surrogate, settings.external);
    if (auto* external = dynamic_cast<ExternalBackend*>(backend.get())) external->start();
    return execute_run(settings, *backend, out_dir, hooks);
}

RunResult execute_run(const RunSettings& settings, Backend& backend, const fs::path& out_dir,
                      const SearchHooks& hooks) {
    if (auto problem = settings.search.check()) throw ConfigError(*problem);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create artifact directory " + out_dir.string() + ": " + ec.message());

    std::ofstream history_out(out_dir / "history.jsonl", std::ios::binary | std::ios::trunc);
    if (!history_out) throw Error("cannot write " + (out_dir / "history.jsonl").string());

    SupernetCache cache(backend, settings.cache);
    bool interrupted = false;
    SearchHooks wrapped;
    wrapped.on_evaluated = [&](const EvaluatedCandidate& rec) {
        append_history_line(history_out, rec);
        history_out.flush();
        if (hooks.on_evaluated) hooks.on_evaluated(rec);
    };
    wrapped.should_stop = [&] {
        if (hooks.should_stop && hooks.should_stop()) interrupted = true;
        return interrupted;
    };

    RunResult result;
    result.history = run_search(settings.search, cache, wrapped);
    result.counters = cache.counters();
    result.supernets = cache.states();
    result.interrupted = interrupted;
    history_out.close();

    const auto& records = result.history.records;
    write_analysis_artifacts(out_dir, records, settings.fitness_window);

    ordered_json summary;
    summary["config"] = run_settings_to_json(settings);
    summary["seed"] = settings.search.seed;
    summary["start_time"] = result.history.start_time;
    summary["interrupted"] = interrupted;
    summary["evaluated"] = records.size();
    summary["counters"] = {{"evaluations", result.counters.evaluations},
                           {"evaluation_failures", result.counters.evaluation_failures},
                           {"pretrains", result.counters.pretrains}};
    ordered_json supernets = ordered_json::array();
    for (const auto& s : result.supernets) {
        ordered_json e = data_config_to_json(s.data_config);
        e["status"] = std::string(to_string(s.status));
        e["pretrain_steps"] = s.pretrain_steps;
        if (!s.error.empty()) e["error"] = s.error;
        supernets.push_back(e);
    }
    summary["supernets"] = supernets;
    const auto best = best_by_fitness(records);
    summary["best"] = best ? record_to_json(*best) : ordered_json(nullptr);
    std::int64_t feasible_count = 0;
    for (const auto& r : records) feasible_count += r.ok() && feasible(r.estimate, settings.search.constraints);
    summary["feasible_evaluated"] = feasible_count;
    summary["pareto_size"] = pareto_front(records).size();
    write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");
    return result;
}

std::vector<EvaluatedCandidate> merge_pareto(std::span<const fs::path> histories, const fs::path& out_dir) {
    if (histories.empty()) throw ConfigError("at least one history file is required");
    std::vector<EvaluatedCandidate> all;
    std::vector<std::string> sources;
    for (const auto& path : histories) {
        auto records = read_history_jsonl(path);
        for (auto& r : records) {
            all.push_back(std::move(r));
            sources.push_back(path.string());
        }
    }
    std::vector<EvaluatedCandidate> front;
    std::vector<std::string> front_sources;
    for (std::size_t i : pareto_front_indices(all)) {
        front.push_back(all[i]);
        front_sources.push_back(sources[i]);
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create output directory " + out_dir.string() + ": " + ec.message());
    write_text_file(out_dir / "pareto.json", pareto_json(front));
    std::ostringstream csv;
    write_frontier_csv(csv, front, front_sources);
    write_text_file(out_dir / "frontier.csv", csv.str());
    return front;
}

} // namespace dnas
