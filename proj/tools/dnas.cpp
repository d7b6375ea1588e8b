// Command-line front end: search, describe, pareto.

#include <algorithm>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dnas/arch_model.hpp"
#include "dnas/error.hpp"
#include "dnas/resource_estimator.hpp"
#include "dnas/run.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitEvaluator = 2;

constexpr const char* kArtifactRootEnv = "DNAS_ARTIFACT_ROOT";

volatile std::sig_atomic_t g_interrupted = 0;

extern "C" void on_interrupt(int) { g_interrupted = 1; }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Reads a flat `key = value` document (also accepts `key: value`, `#` comments, quoted values)
/// and turns it into command-line arguments for `sub`. Unknown keys are rejected.
std::vector<std::string> config_file_args(const std::string& path, CLI::App& sub) {
    std::ifstream in(path);
    if (!in) throw dnas::ConfigError("cannot read config file " + path);
    std::vector<std::string> args;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        auto sep = line.find('=');
        if (sep == std::string::npos) sep = line.find(':');
        if (sep == std::string::npos)
            throw dnas::ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, sep));
        std::string value = trim(line.substr(sep + 1));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
            value = value.substr(1, value.size() - 2);
        std::replace(key.begin(), key.end(), '_', '-');
        if (key == "config") continue;

        const CLI::Option* opt = nullptr;
        try {
            opt = sub.get_option("--" + key);
        } catch (const CLI::OptionNotFound&) {
            throw dnas::ConfigError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (opt->get_expected_min() == 0) {
            if (value == "true" || value == "1" || value == "yes") args.push_back("--" + key);
            else if (value != "false" && value != "0" && value != "no")
                throw dnas::ConfigError(path + ":" + std::to_string(line_no) + ": '" + key + "' expects true/false");
            continue;
        }
        args.push_back("--" + key);
        std::string token;
        // list-valued options (weights, backend command) are whitespace or comma separated
        if (opt->get_expected_max() > 1) {
            for (char& ch : value)
                if (ch == ',') ch = ' ';
            std::istringstream list(value);
            while (list >> token) args.push_back(token);
        } else {
            args.push_back(value);
        }
    }
    return args;
}

struct SearchOptions {
    std::string config_file;
    std::string preset = "large";
    std::optional<std::int64_t> max_ram;
    std::optional<std::int64_t> max_flash;
    std::string evaluator = "surrogate";
    std::vector<std::string> backend_command;
    std::optional<std::int64_t> budget_evals;
    std::optional<double> budget_seconds;
    std::uint64_t seed = 0;
    int population_size = 25;
    int tournament_size = 3;
    double crossover_rate = 0.9;
    double mutation_rate = 0.15;
    std::vector<double> weights{0.2, 0.2, 0.2, 0.2, 0.2};
    std::int64_t dtype_bytes = 1;
    std::int64_t flash_overhead = 0;
    bool hardware_aware = false;
    std::optional<int> fixed_resolution;
    std::string fixed_color;
    double noise = 0.05;
    std::int64_t pretrain_steps = 30'000;
    std::int64_t finetune_steps = 100;
    double pretrain_timeout_s = 24 * 3600.0;
    double evaluate_timeout_s = 3600.0;
    int concurrency = 1;
    std::size_t window = 25;
    std::string out;
};

void add_search_options(CLI::App& sub, SearchOptions& o) {
    sub.add_option("--config", o.config_file, "Flat key = value run configuration; flags override it");
    sub.add_option("--preset", o.preset, "Device preset: large, medium or small")
        ->check(CLI::IsMember({"large", "medium", "small"}));
    sub.add_option("--max-ram", o.max_ram, "RAM limit in bytes (overrides preset)");
    sub.add_option("--max-flash", o.max_flash, "Flash limit in bytes (overrides preset)");
    sub.add_option("--evaluator", o.evaluator, "surrogate or external")->check(CLI::IsMember({"surrogate", "external"}));
    sub.add_option("--backend-command", o.backend_command, "Worker argv for the external evaluator")->expected(1, -1);
    sub.add_option("--budget-evals", o.budget_evals, "Stop after N evaluations");
    sub.add_option("--budget-seconds", o.budget_seconds, "Stop after S seconds");
    sub.add_option("--seed", o.seed, "Random seed");
    sub.add_option("--population-size", o.population_size);
    sub.add_option("--tournament-size", o.tournament_size);
    sub.add_option("--crossover-rate", o.crossover_rate);
    sub.add_option("--mutation-rate", o.mutation_rate, "Per-gene mutation probability");
    sub.add_option("--weights", o.weights, "Fitness weights w1..w5")->expected(5);
    sub.add_option("--dtype-bytes", o.dtype_bytes, "Bytes per stored element");
    sub.add_option("--flash-overhead", o.flash_overhead, "Fixed application flash overhead in bytes");
    sub.add_flag("--hardware-aware", o.hardware_aware, "Freeze the data configuration (default 224/rgb)");
    sub.add_option("--fixed-resolution", o.fixed_resolution, "Pin the resolution gene");
    sub.add_option("--fixed-color", o.fixed_color, "Pin the color gene")->check(CLI::IsMember({"rgb", "monochrome"}));
    sub.add_option("--noise", o.noise, "Surrogate noise amplitude");
    sub.add_option("--pretrain-steps", o.pretrain_steps);
    sub.add_option("--finetune-steps", o.finetune_steps);
    sub.add_option("--pretrain-timeout", o.pretrain_timeout_s, "Seconds");
    sub.add_option("--evaluate-timeout", o.evaluate_timeout_s, "Seconds");
    sub.add_option("--concurrency", o.concurrency, "Parallel evaluations while filling the initial population");
    sub.add_option("--window", o.window, "Trailing window of fitness_evolution.csv");
    sub.add_option("--out", o.out, std::string("Artifact directory (default: $") + kArtifactRootEnv + "/<run name>)");
}

dnas::RunSettings to_settings(const SearchOptions& o) {
    dnas::RunSettings s;
    const auto preset = dnas::find_preset(o.preset);
    if (!preset) throw dnas::ConfigError("unknown preset " + o.preset);
    s.preset = o.preset;
    s.search.constraints = preset->constraints;
    if (o.max_ram) s.search.constraints.max_ram = *o.max_ram;
    if (o.max_flash) s.search.constraints.max_flash = *o.max_flash;
    s.search.budget.max_evaluations = o.budget_evals;
    s.search.budget.max_seconds = o.budget_seconds;
    if (!o.budget_evals && !o.budget_seconds) s.search.budget.max_evaluations = 200;
    s.search.seed = o.seed;
    s.search.population_size = o.population_size;
    s.search.tournament_size = o.tournament_size;
    s.search.crossover_rate = o.crossover_rate;
    s.search.mutation_rate = o.mutation_rate;
    if (o.weights.size() != 5) throw dnas::ConfigError("exactly five fitness weights are required");
    std::copy(o.weights.begin(), o.weights.end(), s.search.weights.w.begin());
    s.search.dtype = dnas::DatatypeSize{o.dtype_bytes};
    s.search.flash_overhead = o.flash_overhead;
    if (o.fixed_resolution) s.search.locks.resolution = *o.fixed_resolution;
    if (!o.fixed_color.empty()) s.search.locks.color = dnas::parse_color(o.fixed_color);
    if (o.hardware_aware) {
        if (!s.search.locks.resolution) s.search.locks.resolution = 224;
        if (!s.search.locks.color) s.search.locks.color = dnas::Color::rgb;
    }
    s.search.initial_concurrency = o.concurrency;
    s.evaluator = o.evaluator;
    s.surrogate.noise_amplitude = o.noise;
    s.surrogate.seed = o.seed;
    if (o.noise < 0) throw dnas::ConfigError("noise amplitude must be >= 0");
    s.external.command = o.backend_command;
    auto ms = [](double seconds) { return std::chrono::milliseconds(static_cast<std::int64_t>(seconds * 1000.0)); };
    s.external.pretrain_timeout = ms(o.pretrain_timeout_s);
    s.external.evaluate_timeout = ms(o.evaluate_timeout_s);
    s.cache.pretrain_steps = o.pretrain_steps;
    s.cache.finetune_steps = o.finetune_steps;
    s.cache.max_concurrent_evaluations = o.concurrency;
    if (o.window == 0) throw dnas::ConfigError("window must be >= 1");
    s.fitness_window = o.window;
    if (auto problem = s.search.check()) throw dnas::ConfigError(*problem);
    return s;
}

std::filesystem::path output_dir(const SearchOptions& o, const dnas::RunSettings& s) {
    if (!o.out.empty()) return o.out;
    const char* root = std::getenv(kArtifactRootEnv);
    std::string name = o.preset + (s.search.locks.frozen_data() ? "-hw" : "-data") + "-seed" + std::to_string(o.seed);
    return std::filesystem::path(root && *root ? root : "runs") / name;
}

int cmd_search(const SearchOptions& o) {
    dnas::RunSettings settings;
    try {
        settings = to_settings(o);
    } catch (const dnas::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    const auto out = output_dir(o, settings);

    std::unique_ptr<dnas::Backend> backend;
    try {
        backend = dnas::make_backend(settings.evaluator, settings.surrogate, settings.external);
        if (auto* external = dynamic_cast<dnas::ExternalBackend*>(backend.get())) external->start();
    } catch (const dnas::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const dnas::Error& e) {
        std::cerr << "evaluator failure: " << e.what() << '\n';
        return kExitEvaluator;
    }

    std::signal(SIGINT, on_interrupt);
    std::signal(SIGTERM, on_interrupt);
    dnas::SearchHooks hooks;
    hooks.should_stop = [] { return g_interrupted != 0; };

    dnas::RunResult result;
    try {
        result = dnas::execute_run(settings, *backend, out, hooks);
    } catch (const dnas::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const dnas::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitEvaluator;
    }

    const auto& records = result.history.records;
    const auto best = dnas::best_by_fitness(records);
    std::cout << "evaluated " << records.size() << " candidates (" << result.counters.evaluation_failures
              << " failed), " << result.counters.pretrains << " supernet pretrains\n";
    if (best) {
        std::cout << "best: " << dnas::to_string(best->candidate) << " fitness=" << best->fitness_value
                  << " accuracy=" << best->accuracy() << " ram=" << best->estimate.ram_bytes
                  << " flash=" << best->estimate.flash_bytes << '\n';
    }
    if (result.interrupted) std::cout << "interrupted; partial artifacts written\n";
    std::cout << "artifacts: " << out.string() << '\n';
    if (!records.empty() && !best) {
        std::cerr << "evaluator failure: every evaluation failed\n";
        return kExitEvaluator;
    }
    return kExitOk;
}

struct DescribeOptions {
    std::string spec;
    std::optional<int> resolution;
    std::string color;
    std::string depths;
    std::optional<double> alpha;
    std::int64_t dtype_bytes = 1;
    std::int64_t flash_overhead = 0;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(s);
    while (std::getline(in, part, sep)) parts.push_back(trim(part));
    return parts;
}

/// Accepts "RES:COLOR:b3,b4,b5,b6,b7:ALPHA"; individual flags override the fields.
dnas::Candidate parse_candidate(const DescribeOptions& o) {
    int resolution = 224;
    std::string color = "rgb";
    std::string depths = "3,4,3,3,1";
    double alpha = 1.0;
    if (!o.spec.empty()) {
        const auto parts = split(o.spec, ':');
        if (parts.size() != 4) throw dnas::ConfigError("candidate spec must look like 224:rgb:3,4,3,3,1:1.0");
        try {
            resolution = std::stoi(parts[0]);
            alpha = std::stod(parts[3]);
        } catch (const std::exception&) {
            throw dnas::ConfigError("candidate spec must look like 224:rgb:3,4,3,3,1:1.0");
        }
        color = parts[1];
        depths = parts[2];
    }
    if (o.resolution) resolution = *o.resolution;
    if (!o.color.empty()) color = o.color;
    if (!o.depths.empty()) depths = o.depths;
    if (o.alpha) alpha = *o.alpha;

    dnas::Candidate c;
    c.data.resolution = resolution;
    const auto parsed_color = dnas::parse_color(color);
    if (!parsed_color) throw dnas::InvalidCandidateError("unknown color '" + color + "'");
    c.data.color = *parsed_color;
    const auto d = split(depths, ',');
    if (d.size() != dnas::kSearchedStages) throw dnas::InvalidCandidateError("depths need five values b3,b4,b5,b6,b7");
    for (std::size_t i = 0; i < d.size(); ++i) {
        try {
            c.model.depths[i] = std::stoi(d[i]);
        } catch (const std::exception&) {
            throw dnas::InvalidCandidateError("depth '" + d[i] + "' is not an integer");
        }
    }
    const auto a = dnas::Alpha::from_double(alpha);
    if (!a) throw dnas::InvalidCandidateError("alpha must be a multiple of 0.1");
    c.model.alpha = *a;
    if (auto v = dnas::validate(c)) throw dnas::InvalidCandidateError(*v);
    return c;
}

int cmd_describe(const DescribeOptions& o) {
    dnas::Candidate c;
    try {
        c = parse_candidate(o);
    } catch (const dnas::Error& e) {
        std::cerr << "invalid candidate: " << e.what() << '\n';
        return kExitUsage;
    }
    if (o.dtype_bytes < 1 || o.flash_overhead < 0) {
        std::cerr << "error: dtype-bytes must be >= 1 and flash-overhead >= 0\n";
        return kExitUsage;
    }
    const auto graph = dnas::instantiate(c);
    const dnas::DatatypeSizes dtype{dnas::DatatypeSize{o.dtype_bytes}};
    const auto flash = dnas::estimate_flash(graph, dtype, o.flash_overhead);
    const auto ram = dnas::estimate_ram(graph, dtype);

    std::cout << "candidate: " << dnas::to_string(c) << " (alpha_eff "
              << dnas::effective_alpha(c.data.color, c.model.alpha) << ")\n\n";
    dnas::print_layer_table(std::cout, graph);
    std::cout << "\nparameters: " << dnas::count_parameters(graph) << '\n';
    std::cout << "flash_bytes: " << flash << '\n';
    std::cout << "ram_bytes: " << ram << '\n';
    for (const auto& p : dnas::kDevicePresets) {
        const auto& k = p.constraints;
        std::cout << "preset " << p.name << " (" << k.max_ram / dnas::kKiB << " KB RAM, " << k.max_flash / dnas::kKiB
                  << " KB flash): RAM " << (ram > k.max_ram ? "exceeds " : "fits ") << p.name << " preset, flash "
                  << (flash > k.max_flash ? "exceeds " : "fits ") << p.name << " preset\n";
    }
    return kExitOk;
}

int cmd_pareto(const std::vector<std::string>& files, const std::string& out) {
    std::vector<std::filesystem::path> paths(files.begin(), files.end());
    try {
        const auto front = dnas::merge_pareto(paths, out);
        std::cout << "front of " << front.size() << " candidates written to " << out << '\n';
    } catch (const dnas::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-aware neural architecture search for microcontroller memory budgets"};
    app.name("dnas");
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    SearchOptions search;
    auto* search_cmd = app.add_subcommand("search", "Run a search and write its artifact directory");
    add_search_options(*search_cmd, search);

    DescribeOptions describe;
    auto* describe_cmd = app.add_subcommand("describe", "Print the layer table and memory estimates of a candidate");
    describe_cmd->add_option("candidate", describe.spec, "RES:COLOR:b3,b4,b5,b6,b7:ALPHA, e.g. 96:monochrome:2,2,0,0,0:0.5");
    describe_cmd->add_option("--resolution", describe.resolution);
    describe_cmd->add_option("--color", describe.color);
    describe_cmd->add_option("--depths", describe.depths, "b3,b4,b5,b6,b7");
    describe_cmd->add_option("--alpha", describe.alpha);
    describe_cmd->add_option("--dtype-bytes", describe.dtype_bytes);
    describe_cmd->add_option("--flash-overhead", describe.flash_overhead);

    std::vector<std::string> pareto_files;
    std::string pareto_out = ".";
    auto* pareto_cmd = app.add_subcommand("pareto", "Merge run histories and compute the global Pareto front");
    pareto_cmd->add_option("histories", pareto_files, "history.jsonl files")->required();
    pareto_cmd->add_option("--out", pareto_out, "Output directory for pareto.json and frontier.csv");

    // Config-file values go first so that explicit flags win.
    std::vector<std::string> args(argv + 1, argv + argc);
    if (!args.empty() && args.front() == "search") {
        for (std::size_t i = 1; i < args.size(); ++i) {
            std::string path;
            if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
            else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
            if (path.empty()) continue;
            try {
                auto file_args = config_file_args(path, *search_cmd);
                args.insert(args.begin() + 1, file_args.begin(), file_args.end());
            } catch (const dnas::Error& e) {
                std::cerr << "error: " << e.what() << '\n';
                return kExitUsage;
            }
            break;
        }
    }
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (*search_cmd) return cmd_search(search);
    if (*describe_cmd) return cmd_describe(describe);
    if (*pareto_cmd) return cmd_pareto(pareto_files, pareto_out);
    return kExitUsage;
}
