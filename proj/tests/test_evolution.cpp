#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "dnas/error.hpp"
#include "dnas/evolution.hpp"
#include "oracle/pareto_oracle.hpp"

using namespace dnas;

namespace {

EvaluatedCandidate scored(std::uint64_t index, double fitness_value) {
    EvaluatedCandidate r;
    r.eval_index = index;
    r.fitness_value = fitness_value;
    r.metrics = EvalMetrics{0.7, 0.7, 0.7};
    return r;
}

EvaluatedCandidate point(std::uint64_t index, double acc, std::int64_t ram, std::int64_t flash) {
    EvaluatedCandidate r;
    r.eval_index = index;
    r.metrics = EvalMetrics{acc, acc, acc};
    r.estimate = {flash, ram};
    return r;
}

/// Fails every evaluation for monochrome inputs.
class MonochromeFails : public Backend {
public:
    void pretrain(const DataConfig& data, std::int64_t) override {
        if (data.color == Color::monochrome) throw EvaluationError("no monochrome data");
    }
    EvalMetrics evaluate(const Candidate& c, std::int64_t) override { return surrogate_evaluate(c, {}); }
};

SearchConfig small_config(std::uint64_t seed, std::int64_t evals) {
    SearchConfig cfg;
    cfg.seed = seed;
    cfg.budget = {evals, std::nullopt};
    return cfg;
}

std::vector<std::uint64_t> indices_of(const std::vector<EvaluatedCandidate>& records) {
    std::vector<std::uint64_t> out;
    for (const auto& r : records) out.push_back(r.eval_index);
    return out;
}

} // namespace

TEST_CASE("tournament of one member") {
    Rng rng(1);
    std::vector<EvaluatedCandidate> pop{scored(0, 0.3)};
    CHECK(tournament_select(pop, 1, rng).eval_index == 0);
}

TEST_CASE("tournament over the whole population returns the fittest") {
    Rng rng(2);
    std::vector<EvaluatedCandidate> pop{scored(0, 0.1), scored(1, 0.9), scored(2, 0.5), scored(3, 0.9)};
    for (int i = 0; i < 100; ++i) CHECK(tournament_select(pop, 4, rng).eval_index == 1);
}

TEST_CASE("k=2 of 4 picks the best half the time") {
    Rng rng(3);
    std::vector<EvaluatedCandidate> pop{scored(0, 0.1), scored(1, 0.2), scored(2, 0.9), scored(3, 0.3)};
    constexpr int n = 20'000;
    int wins = 0;
    for (int i = 0; i < n; ++i) wins += tournament_select(pop, 2, rng).eval_index == 2;
    // 1 - C(3,2)/C(4,2)
    CHECK(std::abs(static_cast<double>(wins) / n - 0.5) <= 0.02);
}

TEST_CASE("tournament larger than the population is an error") {
    Rng rng(4);
    std::vector<EvaluatedCandidate> pop{scored(0, 0.1), scored(1, 0.2)};
    CHECK_THROWS_AS(tournament_select(pop, 3, rng), ConfigError);
}

TEST_CASE("crossover of identical parents is the parent") {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto a = random_candidate(rng);
        CHECK(crossover(a, a, rng) == a);
    }
}

TEST_CASE("crossover repairs depths") {
    Candidate a, b;
    a.data = {64, Color::rgb};
    b.data = {192, Color::monochrome};
    a.model.depths = {3, 4, 0, 0, 0};
    b.model.depths = {0, 4, 3, 3, 1};
    a.model.alpha = Alpha{2};
    b.model.alpha = Alpha{9};
    Rng rng(6);
    bool saw_repair = false;
    for (int i = 0; i < 500; ++i) {
        const auto child = crossover(a, b, rng);
        REQUIRE_FALSE(validate(child).has_value());
        saw_repair |= child.model.depths[0] == 0 && child.model.depths[1] == 0;
    }
    CHECK(saw_repair);
}

TEST_CASE("crossover children are valid and inherit every gene") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const auto a = random_candidate(rng);
        const auto b = random_candidate(rng);
        const auto child = crossover(a, b, rng);
        REQUIRE_FALSE(validate(child).has_value());
        CHECK((child.data.resolution == a.data.resolution || child.data.resolution == b.data.resolution));
        CHECK((child.data.color == a.data.color || child.data.color == b.data.color));
        CHECK((child.model.alpha == a.model.alpha || child.model.alpha == b.model.alpha));
        for (std::size_t s = 0; s < kSearchedStages; ++s)
            CHECK((child.model.depths[s] == 0 || child.model.depths[s] == a.model.depths[s] ||
                   child.model.depths[s] == b.model.depths[s]));
    }
}

TEST_CASE("mutation rate 0 changes nothing") {
    Rng rng(8);
    for (int i = 0; i < 500; ++i) {
        const auto c = random_candidate(rng);
        CHECK(mutate(c, 0.0, rng) == c);
    }
}

TEST_CASE("mutation rate 1 stays in the space") {
    Rng rng(9);
    for (int i = 0; i < 2000; ++i) REQUIRE_FALSE(validate(mutate(random_candidate(rng), 1.0, rng)).has_value());
}

TEST_CASE("ordered genes take a local step half of the time") {
    Rng rng(10);
    constexpr int n = 20'000;
    int res_local = 0, alpha_local = 0;
    for (int i = 0; i < n; ++i) {
        const auto c = random_candidate(rng);
        MutationTrace trace;
        const auto m = mutate(c, 1.0, rng, {}, &trace);
        REQUIRE(trace.resolution != GeneMove::none);
        REQUIRE(trace.alpha != GeneMove::none);
        if (trace.resolution == GeneMove::local) {
            ++res_local;
            CHECK(std::abs(resolution_index(m.data.resolution) - resolution_index(c.data.resolution)) == 1);
        }
        if (trace.alpha == GeneMove::local) {
            ++alpha_local;
            CHECK(std::abs(m.model.alpha.tenths() - c.model.alpha.tenths()) == 1);
        }
    }
    CHECK(std::abs(static_cast<double>(res_local) / n - 0.5) <= 0.03);
    CHECK(std::abs(static_cast<double>(alpha_local) / n - 0.5) <= 0.03);
}

TEST_CASE("mutation respects gene locks") {
    Rng rng(11);
    GeneLocks locks{224, Color::rgb};
    for (int i = 0; i < 1000; ++i) {
        const auto c = random_candidate(rng, locks);
        CHECK(c.data == DataConfig{224, Color::rgb});
        const auto m = mutate(c, 1.0, rng, locks);
        CHECK(m.data == DataConfig{224, Color::rgb});
    }
}

TEST_CASE("fitness evolution by hand") {
    std::vector<EvaluatedCandidate> records;
    for (int i = 0; i < 5; ++i) records.push_back(scored(static_cast<std::uint64_t>(i), i + 1.0));
    records.insert(records.begin() + 2, EvaluatedCandidate{});
    records[2].eval_index = 99;
    records[2].error = "boom";
    const auto series = fitness_evolution(records, 2);
    REQUIRE(series.size() == 5);
    const double expected[] = {1.0, 1.5, 2.5, 3.5, 4.5};
    for (int i = 0; i < 5; ++i) {
        CHECK(series[static_cast<std::size_t>(i)].first == static_cast<std::uint64_t>(i));
        CHECK(series[static_cast<std::size_t>(i)].second == doctest::Approx(expected[i]));
    }
    CHECK_THROWS_AS(fitness_evolution(records, 0), ConfigError);
}

TEST_CASE("pareto front matches the brute-force oracle") {
    Rng rng(12);
    std::uniform_int_distribution<int> coarse(0, 6);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<EvaluatedCandidate> records;
        for (std::uint64_t i = 0; i < 60; ++i) {
            // coarse values force ties and duplicates
            auto r = point(i, 0.5 + 0.05 * coarse(rng), 1000 * coarse(rng), 5000 * coarse(rng));
            if (coarse(rng) == 0) r.metrics.reset();
            records.push_back(r);
        }
        REQUIRE(indices_of(pareto_front(records)) == oracle::pareto_indices(records));
    }
}

TEST_CASE("dominance edge cases") {
    const auto a = point(0, 0.8, 100, 100);
    CHECK_FALSE(dominates(a, a));
    CHECK(dominates(a, point(1, 0.8, 100, 101)));
    CHECK_FALSE(dominates(a, point(1, 0.81, 100, 101)));
    std::vector<EvaluatedCandidate> twins{a, point(1, 0.8, 100, 100)};
    CHECK(pareto_front(twins).size() == 2);
    CHECK(pareto_front(std::vector<EvaluatedCandidate>{}).empty());
    CHECK(cumulative_pareto_fraction(std::vector<EvaluatedCandidate>{}).empty());
}

TEST_CASE("cumulative pareto fraction") {
    std::vector<EvaluatedCandidate> records{point(0, 0.6, 100, 100), point(1, 0.7, 200, 200), point(2, 0.5, 300, 300),
                                            point(3, 0.8, 300, 300)};
    const auto series = cumulative_pareto_fraction(records);
    REQUIRE(series.size() == 4);
    // front = {0, 1, 3}
    CHECK(series[0].second == doctest::Approx(1.0 / 3));
    CHECK(series[1].second == doctest::Approx(2.0 / 3));
    CHECK(series[2].second == doctest::Approx(2.0 / 3));
    CHECK(series[3].second == 1.0);
}

TEST_CASE("budget equal to the population evaluates only random candidates") {
    SurrogateBackend backend;
    SupernetCache cache(backend);
    const auto h = run_search(small_config(1, 25), cache);
    REQUIRE(h.records.size() == 25);
    for (std::size_t i = 0; i < h.records.size(); ++i) {
        CHECK(h.records[i].eval_index == i);
        CHECK(h.records[i].ok());
    }
    CHECK(cache.counters().evaluations == 25);
}

TEST_CASE("search is deterministic for a seed") {
    auto run = [](std::uint64_t seed) {
        SurrogateBackend backend;
        SupernetCache cache(backend);
        return run_search(small_config(seed, 150), cache);
    };
    const auto a = run(5), b = run(5), c = run(6);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].candidate == b.records[i].candidate);
        CHECK(a.records[i].fitness_value == b.records[i].fitness_value);
    }
    bool differs = false;
    for (std::size_t i = 0; i < a.records.size(); ++i) differs |= !(a.records[i].candidate == c.records[i].candidate);
    CHECK(differs);
}

TEST_CASE("search improves over its initial population") {
    int improved = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SurrogateBackend backend;
        SupernetCache cache(backend);
        const auto h = run_search(small_config(seed, 300), cache);
        const auto initial = best_by_fitness(std::span(h.records).first(25));
        const auto overall = best_by_fitness(h.records);
        improved += overall->fitness_value > initial->fitness_value;
    }
    CHECK(improved >= 4);
}

TEST_CASE("a time budget of zero evaluates nothing") {
    SurrogateBackend backend;
    SupernetCache cache(backend);
    SearchConfig cfg;
    cfg.budget = {std::nullopt, 0.0};
    CHECK(run_search(cfg, cache).records.empty());
}

TEST_CASE("stop hook ends the search early") {
    SurrogateBackend backend;
    SupernetCache cache(backend);
    int seen = 0;
    SearchHooks hooks;
    hooks.on_evaluated = [&](const EvaluatedCandidate&) { ++seen; };
    hooks.should_stop = [&] { return seen >= 40; };
    const auto h = run_search(small_config(2, 200), cache, hooks);
    CHECK(h.records.size() == 40);
}

TEST_CASE("failed evaluations are recorded and skipped") {
    MonochromeFails backend;
    SupernetCache cache(backend);
    const auto h = run_search(small_config(3, 120), cache);
    CHECK(h.records.size() == 120);
    int failures = 0;
    for (const auto& r : h.records) {
        if (r.ok()) continue;
        ++failures;
        CHECK(r.candidate.data.color == Color::monochrome);
        CHECK_FALSE(r.error.empty());
    }
    CHECK(failures > 0);
    CHECK(cache.counters().evaluation_failures == failures);
    for (const auto& r : pareto_front(h)) CHECK(r.ok());
    CHECK(best_by_fitness(h.records)->candidate.data.color == Color::rgb);
}

TEST_CASE("hardware-aware search never leaves the locked data config") {
    SurrogateBackend backend;
    SupernetCache cache(backend);
    auto cfg = small_config(4, 100);
    cfg.locks = {224, Color::rgb};
    const auto h = run_search(cfg, cache);
    for (const auto& r : h.records) CHECK(r.candidate.data == DataConfig{224, Color::rgb});
    CHECK(cache.counters().pretrains == 1);
}

TEST_CASE("parallel initial population gives the same history") {
    auto run = [](int concurrency) {
        SurrogateBackend backend;
        SupernetCache cache(backend, {30'000, 100, 4});
        auto cfg = small_config(7, 80);
        cfg.initial_concurrency = concurrency;
        return run_search(cfg, cache);
    };
    const auto a = run(1), b = run(4);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) CHECK(a.records[i].candidate == b.records[i].candidate);
}

TEST_CASE("invalid search configuration") {
    SurrogateBackend backend;
    SupernetCache cache(backend);
    auto cfg = small_config(0, 10);
    cfg.tournament_size = 30;
    CHECK_THROWS_AS(run_search(cfg, cache), ConfigError);
    cfg = small_config(0, 10);
    cfg.budget = {};
    CHECK_THROWS_AS(run_search(cfg, cache), ConfigError);
    cfg = small_config(0, 10);
    cfg.mutation_rate = 1.5;
    CHECK(cfg.check().has_value());
}
