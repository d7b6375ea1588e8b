// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "dnas/arch_model.hpp"
#include "dnas/resource_estimator.hpp"
#include "dnas/run.hpp"
#include "oracle/pareto_oracle.hpp"
#include "oracle/shape_walker.hpp"

using namespace dnas;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void guarded(const std::string& name, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(name, false, std::string("exception: ") + e.what());
    }
}

template <typename... Args>
std::string fmt(const char* format, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

/// Surrogate with the default noise, seeded like the search.
SearchHistory surrogate_search(std::uint64_t seed, std::int64_t evals, const Constraints& constraints,
                               const GeneLocks& locks = {}) {
    SurrogateParams params;
    params.seed = seed;
    SurrogateBackend backend(params);
    SupernetCache cache(backend);
    SearchConfig cfg;
    cfg.seed = seed;
    cfg.budget = {evals, std::nullopt};
    cfg.constraints = constraints;
    cfg.locks = locks;
    return run_search(cfg, cache);
}

double best_fitness(std::span<const EvaluatedCandidate> records) {
    const auto best = best_by_fitness(records);
    return best ? best->fitness_value : -1e300;
}

void estimator_oracle() {
    const auto t0 = Clock::now();
    Rng rng(20240501);
    int mismatches = 0;
    for (int i = 0; i < 500; ++i) {
        const auto c = random_candidate(rng);
        const auto g = instantiate(c);
        mismatches += estimate_flash(g, DatatypeSize{1}) != oracle::flash_bytes(c, 1);
        mismatches += estimate_ram(g, DatatypeSize{1}) != oracle::ram_bytes(c, 1);
    }
    const double t = seconds_since(t0);
    report("estimator oracle equivalence", mismatches == 0 && t < 10.0,
           fmt("500 candidates, %d mismatches, %.3f s (limit 10 s)", mismatches, t));
}

void fitness_examples() {
    const Constraints large = kDevicePresets[0].constraints;
    const ResourceEstimate within{kMiB, 100 * kKiB};
    const double a = fitness({1, 1, 1}, within, large);
    const double b = fitness({0, 0, 0}, within, large);
    const double c = fitness({0.8, 0.8, 0.8}, {kMiB, 2 * large.max_ram}, large);
    report("fitness arithmetic", a == 1.0 && b == 0.4 && c == 0.68,
           fmt("%.17g / %.17g / %.17g (expected 1.0 / 0.4 / 0.68 exactly)", a, b, c));
}

void feasibility() {
    Rng rng(7);
    int invalid = 0;
    for (int i = 0; i < 10'000; ++i) invalid += validate(random_candidate(rng)).has_value();
    int chained = 0;
    while (chained < 10'000) {
        Candidate current = random_candidate(rng);
        for (int step = 0; step < 50 && chained < 10'000; ++step, ++chained) {
            current = mutate(crossover(current, random_candidate(rng), rng), 0.3, rng);
            invalid += validate(current).has_value();
        }
    }
    report("feasibility preservation", invalid == 0,
           fmt("10000 sampled + %d crossover/mutation children, %d invalid", chained, invalid));
}

void pareto_correctness() {
    int mismatched = 0, non_monotone = 0, bad_end = 0;
    for (std::uint64_t h = 0; h < 50; ++h) {
        const auto history = surrogate_search(1000 + h, 200, kDevicePresets[0].constraints);
        const auto& records = history.records;
        std::vector<std::uint64_t> got;
        for (const auto& r : pareto_front(records)) got.push_back(r.eval_index);
        mismatched += got != oracle::pareto_indices(records);
        const auto series = cumulative_pareto_fraction(records);
        for (std::size_t i = 1; i < series.size(); ++i) non_monotone += series[i].second < series[i - 1].second;
        bad_end += series.empty() || series.back().second != 1.0;
    }
    report("pareto correctness", mismatched == 0 && non_monotone == 0 && bad_end == 0,
           fmt("50 histories x 200: %d front mismatches, %d decreases, %d not ending at 1.0", mismatched, non_monotone,
               bad_end));
}

/// Counts pretrain calls per data config on top of the surrogate.
class CountingSurrogate : public Backend {
public:
    explicit CountingSurrogate(SurrogateParams p) : inner(p) {}
    void pretrain(const DataConfig& data, std::int64_t steps) override {
        ++calls[data];
        inner.pretrain(data, steps);
    }
    EvalMetrics evaluate(const Candidate& c, std::int64_t steps) override { return inner.evaluate(c, steps); }

    SurrogateBackend inner;
    std::map<DataConfig, int> calls;
};

void lazy_supernet() {
    SurrogateParams params;
    params.seed = 42;
    CountingSurrogate backend(params);
    SupernetCache cache(backend);
    SearchConfig cfg;
    cfg.seed = 42;
    cfg.budget = {500, std::nullopt};
    const auto history = run_search(cfg, cache);
    std::set<DataConfig> touched;
    for (const auto& r : history.records) touched.insert(r.candidate.data);
    bool one_each = backend.calls.size() == touched.size();
    for (const auto& [dc, n] : backend.calls) one_each = one_each && n == 1 && touched.contains(dc);
    const auto pretrains = cache.counters().pretrains;
    report("lazy supernet contract", pretrains <= 14 && one_each && pretrains == static_cast<std::int64_t>(touched.size()),
           fmt("%lld pretrains for %zu distinct data configs (limit 14), one per config: %s",
               static_cast<long long>(pretrains), touched.size(), one_each ? "yes" : "no"));
}

void search_effectiveness() {
    const auto t0 = Clock::now();
    const Constraints large = kDevicePresets[0].constraints;
    int improved = 0, strictly = 0, data_wins = 0;
    double data_sum = 0, hw_sum = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto data = surrogate_search(seed, 500, large);
        const auto hw = surrogate_search(seed, 500, large, GeneLocks{224, Color::rgb});
        const auto& recs = data.records;
        const double initial = best_fitness(std::span(recs).first(25));
        const double final_best = best_fitness(recs);
        improved += final_best >= initial;
        strictly += final_best > initial;
        const double hw_best = best_fitness(hw.records);
        data_wins += final_best >= hw_best;
        data_sum += final_best;
        hw_sum += hw_best;
    }
    const double t = seconds_since(t0);
    report("search effectiveness", improved >= 19 && data_wins >= 16 && t < 60.0,
           fmt("improved %d/20 (strictly %d), data-aware >= hardware-aware %d/20 (mean best %.4f vs %.4f), %.2f s",
               improved, strictly, data_wins, data_sum / 20, hw_sum / 20, t));
}

void constraint_ordering() {
    int ordered = 0;
    double sums[3] = {0, 0, 0};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        double best[3];
        for (std::size_t p = 0; p < kDevicePresets.size(); ++p) {
            const auto& k = kDevicePresets[p].constraints;
            const auto history = surrogate_search(seed, 500, k);
            best[p] = 0.0;
            for (const auto& r : history.records)
                if (r.ok() && feasible(r.estimate, k)) best[p] = std::max(best[p], r.accuracy());
            sums[p] += best[p];
        }
        ordered += best[0] >= best[1] && best[1] >= best[2];
    }
    report("constraint ordering", ordered >= 16,
           fmt("large >= medium >= small in %d/20 seeds (mean best feasible accuracy %.4f / %.4f / %.4f)", ordered,
               sums[0] / 20, sums[1] / 20, sums[2] / 20));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void determinism() {
    const auto root = fs::temp_directory_path() / "dnas_acceptance_determinism";
    fs::remove_all(root);
    RunSettings s;
    s.search.seed = 123;
    s.search.budget = {300, std::nullopt};
    s.surrogate.seed = 123;
    execute_run(s, root / "a");
    execute_run(s, root / "b");
    const auto a = slurp(root / "a" / "history.jsonl");
    const auto b = slurp(root / "b" / "history.jsonl");
    report("determinism", !a.empty() && a == b,
           fmt("two 300-evaluation runs, history.jsonl %zu vs %zu bytes, identical: %s", a.size(), b.size(),
               a == b ? "yes" : "no"));
    fs::remove_all(root);
}

void full_size() {
    Candidate c;
    c.data = {224, Color::rgb};
    c.model.depths = {3, 4, 3, 3, 1};
    c.model.alpha = Alpha{10};
    const auto g = instantiate(c);
    const auto params = count_parameters(g);
    const auto w = oracle::walk(c);
    const auto ram = estimate_ram(g, DatatypeSize{1});
    const auto small = find_preset("small")->constraints;
    report("full-size sanity", params == w.params && ram > small.max_ram,
           fmt("%lld parameters (oracle %lld), RAM %lld B vs small limit %lld B", static_cast<long long>(params),
               static_cast<long long>(w.params), static_cast<long long>(ram), static_cast<long long>(small.max_ram)));
}

} // namespace

int main() {
    guarded("estimator oracle equivalence", estimator_oracle);
    guarded("fitness arithmetic", fitness_examples);
    guarded("feasibility preservation", feasibility);
    guarded("pareto correctness", pareto_correctness);
    guarded("lazy supernet contract", lazy_supernet);
    guarded("search effectiveness", search_effectiveness);
    guarded("constraint ordering", constraint_ordering);
    guarded("determinism", determinism);
    guarded("full-size sanity", full_size);
    std::printf("%d criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
