#include "dnas/evolution.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <numeric>

#include "dnas/arch_model.hpp"
#include "dnas/error.hpp"

namespace dnas {

std::optional<std::string> SearchConfig::check() const {
    if (tournament_size < 2) return "tournament_size must be >= 2";
    if (population_size < tournament_size) return "population_size must be >= tournament_size";
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) return "crossover_rate must be in [0, 1]";
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) return "mutation_rate must be in [0, 1]";
    if (!budget.max_evaluations && !budget.max_seconds) return "a budget (evaluations or seconds) is required";
    if (budget.max_evaluations && *budget.max_evaluations < 0) return "evaluation budget must be >= 0";
    if (budget.max_seconds && !(*budget.max_seconds >= 0.0)) return "time budget must be >= 0";
    if (!constraints.valid()) return "RAM and flash limits must be > 0";
    if (!weights.valid()) return "fitness weights must be finite and >= 0";
    if (dtype.data.bytes_per_element < 1 || dtype.activation.bytes_per_element < 1 ||
        dtype.parameter.bytes_per_element < 1)
        return "datatype sizes must be >= 1 byte";
    if (flash_overhead < 0) return "flash overhead must be >= 0";
    if (locks.resolution && resolution_index(*locks.resolution) < 0) return "fixed resolution is not in the search space";
    if (initial_concurrency < 1) return "initial_concurrency must be >= 1";
    return std::nullopt;
}

namespace {

/// Strict "a ranks above b" used by selection and replacement.
bool fitter(const EvaluatedCandidate& a, const EvaluatedCandidate& b) {
    if (a.fitness_value != b.fitness_value) return a.fitness_value > b.fitness_value;
    return a.eval_index < b.eval_index;
}

template <typename T, std::size_t N>
std::size_t index_of(const std::array<T, N>& values, T v) {
    return static_cast<std::size_t>(std::find(values.begin(), values.end(), v) - values.begin());
}

/// Local step to a neighbour with probability 1/2, else uniform over the whole set.
template <typename T, std::size_t N>
T move_ordered(const std::array<T, N>& values, T current, Rng& rng, GeneMove& move) {
    std::bernoulli_distribution local(0.5);
    if (local(rng)) {
        move = GeneMove::local;
        const std::size_t i = index_of(values, current);
        if (i == 0) return values[1];
        if (i == N - 1) return values[N - 2];
        std::bernoulli_distribution up(0.5);
        return up(rng) ? values[i + 1] : values[i - 1];
    }
    move = GeneMove::global;
    std::uniform_int_distribution<std::size_t> pick(0, N - 1);
    return values[pick(rng)];
}

constexpr std::array<int, 10> kAlphaTenths{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

} // namespace

const EvaluatedCandidate& tournament_select(std::span<const EvaluatedCandidate> population, int tournament_size,
                                            Rng& rng) {
    if (tournament_size < 1) throw ConfigError("tournament size must be >= 1");
    if (population.size() < static_cast<std::size_t>(tournament_size))
        throw ConfigError("population of " + std::to_string(population.size()) + " is smaller than tournament size " +
                          std::to_string(tournament_size));

    std::vector<std::size_t> idx(population.size());
    std::iota(idx.begin(), idx.end(), 0);
    const auto* best = &population[0];
    for (int k = 0; k < tournament_size; ++k) {
        std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(k), idx.size() - 1);
        std::swap(idx[static_cast<std::size_t>(k)], idx[pick(rng)]);
        const auto& member = population[idx[static_cast<std::size_t>(k)]];
        if (k == 0 || fitter(member, *best)) best = &member;
    }
    return *best;
}

Candidate crossover(const Candidate& a, const Candidate& b, Rng& rng) {
    std::bernoulli_distribution from_b(0.5);
    Candidate child = a;
    if (from_b(rng)) child.data.resolution = b.data.resolution;
    if (from_b(rng)) child.data.color = b.data.color;
    for (std::size_t i = 0; i < kSearchedStages; ++i)
        if (from_b(rng)) child.model.depths[i] = b.model.depths[i];
    if (from_b(rng)) child.model.alpha = b.model.alpha;
    child.model.depths = repair_depths(child.model.depths);
    return child;
}

Candidate mutate(const Candidate& c, double rate, Rng& rng, const GeneLocks& locks, MutationTrace* trace) {
    MutationTrace local_trace;
    MutationTrace& t = trace ? *trace : local_trace;
    t = {};
    std::bernoulli_distribution hit(rate);
    Candidate out = c;

    if (hit(rng) && !locks.resolution) out.data.resolution = move_ordered(kResolutions, c.data.resolution, rng, t.resolution);
    if (hit(rng) && !locks.color) {
        std::uniform_int_distribution<std::size_t> pick(0, kColors.size() - 1);
        out.data.color = kColors[pick(rng)];
        t.color = true;
    }
    for (std::size_t i = 0; i < kSearchedStages; ++i) {
        if (hit(rng)) {
            std::uniform_int_distribution<int> pick(0, kMaxDepths[i]);
            out.model.depths[i] = pick(rng);
            t.depths[i] = true;
        }
    }
    if (hit(rng)) out.model.alpha = Alpha{move_ordered(kAlphaTenths, c.model.alpha.tenths(), rng, t.alpha)};
    out.model.depths = repair_depths(out.model.depths);
    return out;
}

EvaluatedCandidate evaluate_candidate(const Candidate& candidate, const SearchConfig& config, SupernetCache& cache) {
    EvaluatedCandidate rec;
    rec.candidate = candidate;
    rec.estimate = estimate(instantiate(candidate), config.dtype, config.flash_overhead);
    try {
        rec.metrics = cache.evaluate(candidate);
        rec.fitness_value = fitness(*rec.metrics, rec.estimate, config.constraints, config.weights);
    } catch (const EvaluationError& e) {
        rec.error = e.what();
    }
    return rec;
}

SearchHistory run_search(const SearchConfig& config, SupernetCache& cache, const SearchHooks& hooks) {
    if (auto problem = config.check()) throw ConfigError(*problem);

    SearchHistory history;
    history.config = config;
    history.start_time =
        std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch()).count();
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

    auto remaining = [&]() -> std::int64_t {
        if (hooks.should_stop && hooks.should_stop()) return 0;
        if (config.budget.max_seconds && elapsed() >= *config.budget.max_seconds) return 0;
        if (config.budget.max_evaluations)
            return *config.budget.max_evaluations - static_cast<std::int64_t>(history.records.size());
        return std::numeric_limits<std::int64_t>::max();
    };

    Rng rng(config.seed);
    std::vector<EvaluatedCandidate> population;
    const auto pop_size = static_cast<std::size_t>(config.population_size);

    auto commit = [&](EvaluatedCandidate rec) {
        rec.eval_index = history.records.size();
        rec.candidate.id = rec.eval_index;
        rec.wall_time = elapsed();
        history.records.push_back(rec);
        if (hooks.on_evaluated) hooks.on_evaluated(history.records.back());
        return rec;
    };

    // Steady-state replacement: the weakest member goes (youngest among equals), so the
    // best member survives whenever the population holds at least two.
    auto insert = [&](EvaluatedCandidate rec) {
        if (population.size() < pop_size) {
            population.push_back(std::move(rec));
            return;
        }
        auto worst = std::min_element(population.begin(), population.end(),
                                      [](const auto& a, const auto& b) { return fitter(b, a); });
        *worst = std::move(rec);
    };

    std::bernoulli_distribution do_crossover(config.crossover_rate);

    while (true) {
        const std::int64_t left = remaining();
        if (left <= 0) break;

        if (population.size() < pop_size) {
            // Fill (or refill after failures) with random candidates.
            const auto batch = static_cast<std::size_t>(std::min<std::int64_t>(
                {left, static_cast<std::int64_t>(pop_size - population.size()), config.initial_concurrency}));
            std::vector<Candidate> fresh;
            for (std::size_t i = 0; i < batch; ++i) fresh.push_back(random_candidate(rng, config.locks));
            std::vector<EvaluatedCandidate> results;
            if (batch == 1) {
                results.push_back(evaluate_candidate(fresh.front(), config, cache));
            } else {
                std::vector<std::future<EvaluatedCandidate>> futures;
                for (const auto& c : fresh)
                    futures.push_back(std::async(std::launch::async, [&, c] { return evaluate_candidate(c, config, cache); }));
                for (auto& f : futures) results.push_back(f.get());
            }
            for (auto& r : results) {
                auto rec = commit(std::move(r));
                if (rec.ok()) insert(std::move(rec));
            }
            continue;
        }

        const auto& p1 = tournament_select(population, config.tournament_size, rng);
        const auto& p2 = tournament_select(population, config.tournament_size, rng);
        Candidate child = do_crossover(rng) ? crossover(p1.candidate, p2.candidate, rng)
                                            : (fitter(p1, p2) ? p1 : p2).candidate;
        child = mutate(child, config.mutation_rate, rng, config.locks);
        auto rec = commit(evaluate_candidate(child, config, cache));
        if (rec.ok()) insert(std::move(rec));
    }
    return history;
}

bool dominates(const EvaluatedCandidate& a, const EvaluatedCandidate& b) {
    const double aa = a.accuracy(), ba = b.accuracy();
    const auto& ea = a.estimate;
    const auto& eb = b.estimate;
    if (aa < ba || ea.ram_bytes > eb.ram_bytes || ea.flash_bytes > eb.flash_bytes) return false;
    return aa > ba || ea.ram_bytes < eb.ram_bytes || ea.flash_bytes < eb.flash_bytes;
}

std::vector<std::size_t> pareto_front_indices(std::span<const EvaluatedCandidate> records) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].ok()) order.push_back(i);

    // Lexicographic (accuracy desc, RAM asc, flash asc): any dominator precedes what it dominates,
    // so checking against the front built so far is enough.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const auto& a = records[i];
        const auto& b = records[j];
        if (a.accuracy() != b.accuracy()) return a.accuracy() > b.accuracy();
        if (a.estimate.ram_bytes != b.estimate.ram_bytes) return a.estimate.ram_bytes < b.estimate.ram_bytes;
        return a.estimate.flash_bytes < b.estimate.flash_bytes;
    });

    std::vector<std::size_t> front;
    for (std::size_t i : order) {
        const bool dominated =
            std::any_of(front.begin(), front.end(), [&](std::size_t f) { return dominates(records[f], records[i]); });
        if (!dominated) front.push_back(i);
    }
    std::sort(front.begin(), front.end());
    return front;
}

std::vector<EvaluatedCandidate> pareto_front(std::span<const EvaluatedCandidate> records) {
    const auto front = pareto_front_indices(records);
    std::vector<EvaluatedCandidate> out;
    out.reserve(front.size());
    for (std::size_t i : front) out.push_back(records[i]);
    return out;
}

std::vector<std::pair<std::uint64_t, double>> cumulative_pareto_fraction(std::span<const EvaluatedCandidate> records) {
    const auto front = pareto_front(records);
    if (front.empty()) return {};
    std::vector<std::uint64_t> found;
    for (const auto& f : front) found.push_back(f.eval_index);
    std::sort(found.begin(), found.end());

    std::vector<std::pair<std::uint64_t, double>> series;
    series.reserve(records.size());
    for (const auto& r : records) {
        const auto count = std::upper_bound(found.begin(), found.end(), r.eval_index) - found.begin();
        series.emplace_back(r.eval_index, static_cast<double>(count) / static_cast<double>(found.size()));
    }
    return series;
}

std::vector<std::pair<std::uint64_t, double>> fitness_evolution(std::span<const EvaluatedCandidate> records,
                                                                std::size_t window) {
    if (window == 0) throw ConfigError("fitness window must be >= 1");
    std::vector<double> values;
    std::vector<std::pair<std::uint64_t, double>> series;
    for (const auto& r : records) {
        if (!r.ok()) continue;
        values.push_back(r.fitness_value);
        const std::size_t n = std::min(window, values.size());
        const double sum = std::accumulate(values.end() - static_cast<std::ptrdiff_t>(n), values.end(), 0.0);
        series.emplace_back(r.eval_index, sum / static_cast<double>(n));
    }
    return series;
}

std::optional<EvaluatedCandidate> best_by_fitness(std::span<const EvaluatedCandidate> records) {
    const EvaluatedCandidate* best = nullptr;
    for (const auto& r : records)
        if (r.ok() && (!best || fitter(r, *best))) best = &r;
    if (!best) return std::nullopt;
    return *best;
}

} // namespace dnas
