#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dnas/fitness.hpp"
#include "dnas/resource_estimator.hpp"
#include "dnas/search_space.hpp"
#include "dnas/supernet_cache.hpp"

namespace dnas {

struct EvaluatedCandidate {
    Candidate candidate;
    /// Empty when the evaluation failed; `error` then holds the reason.
    std::optional<EvalMetrics> metrics;
    ResourceEstimate estimate;
    double fitness_value = 0.0;
    std::uint64_t eval_index = 0;
    /// Seconds since search start.
    double wall_time = 0.0;
    std::string error;

    bool ok() const { return metrics.has_value(); }
    double accuracy() const { return metrics ? metrics->accuracy : 0.0; }
};

/// Stop after whichever limit is hit first. At least one must be set.
struct Budget {
    std::optional<std::int64_t> max_evaluations;
    std::optional<double> max_seconds;
};

struct SearchConfig {
    int population_size = 25;
    int tournament_size = 3;
    double crossover_rate = 0.9;
    double mutation_rate = 0.15;
    Budget budget{200, std::nullopt};
    std::uint64_t seed = 0;
    Constraints constraints{512 * 1024, 2 * 1024 * 1024};
    FitnessWeights weights{};
    DatatypeSizes dtype{};
    std::int64_t flash_overhead = 0;
    /// Hardware-aware mode freezes both data genes.
    GeneLocks locks{};
    /// Evaluations dispatched concurrently while filling the initial population.
    int initial_concurrency = 1;

    /// Empty if valid, else the first problem found.
    std::optional<std::string> check() const;
};

struct SearchHistory {
    std::vector<EvaluatedCandidate> records;
    SearchConfig config;
    /// Seconds since the Unix epoch at search start.
    double start_time = 0.0;
};

/// Optional callbacks around the search loop.
struct SearchHooks {
    /// Called after every evaluation, successful or not, in eval_index order.
    std::function<void(const EvaluatedCandidate&)> on_evaluated;
    /// Polled before every evaluation; returning true ends the search early.
    std::function<bool()> should_stop;
};

/// Picks tournament_size members uniformly without replacement and returns the fittest one
/// (ties go to the lower eval_index). Throws ConfigError if the population is too small.
const EvaluatedCandidate& tournament_select(std::span<const EvaluatedCandidate> population, int tournament_size,
                                            Rng& rng);

/// Uniform gene-wise crossover over the 8 genes, followed by depth repair.
Candidate crossover(const Candidate& a, const Candidate& b, Rng& rng);

/// Which kind of move mutate() made on an ordered gene.
enum class GeneMove : std::uint8_t { none, local, global };

struct MutationTrace {
    GeneMove resolution = GeneMove::none;
    GeneMove alpha = GeneMove::none;
    bool color = false;
    std::array<bool, kSearchedStages> depths{};
};

/// Resamples each gene with probability `rate`. Resolution and alpha step to a neighbouring
/// value half of the time and are resampled uniformly otherwise. Locked genes never change.
Candidate mutate(const Candidate& c, double rate, Rng& rng, const GeneLocks& locks = {},
                 MutationTrace* trace = nullptr);

/// Scores a candidate for the given configuration: instantiate, estimate, evaluate, fitness.
/// Evaluation errors are captured in the returned record.
EvaluatedCandidate evaluate_candidate(const Candidate& candidate, const SearchConfig& config, SupernetCache& cache);

/// Steady-state tournament GA. Returns every evaluated candidate, survivors or not.
SearchHistory run_search(const SearchConfig& config, SupernetCache& cache, const SearchHooks& hooks = {});

/// a dominates b: accuracy >=, RAM <=, flash <=, strictly better on at least one.
bool dominates(const EvaluatedCandidate& a, const EvaluatedCandidate& b);

/// Positions of the non-dominated successful records, ascending.
std::vector<std::size_t> pareto_front_indices(std::span<const EvaluatedCandidate> records);

/// Non-dominated successful records, in input order.
std::vector<EvaluatedCandidate> pareto_front(std::span<const EvaluatedCandidate> records);
inline std::vector<EvaluatedCandidate> pareto_front(const SearchHistory& h) { return pareto_front(h.records); }

/// For every record i: fraction of the final front with eval_index <= records[i].eval_index.
std::vector<std::pair<std::uint64_t, double>> cumulative_pareto_fraction(std::span<const EvaluatedCandidate> records);

/// Trailing mean of fitness over the last `window` successful records.
std::vector<std::pair<std::uint64_t, double>> fitness_evolution(std::span<const EvaluatedCandidate> records,
                                                                std::size_t window = 25);

/// Best successful record by fitness (ties to the older one).
std::optional<EvaluatedCandidate> best_by_fitness(std::span<const EvaluatedCandidate> records);

} // namespace dnas
