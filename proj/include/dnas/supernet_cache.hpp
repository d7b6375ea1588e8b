#pragma once

#include <condition_variable>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dnas/evaluator.hpp"

namespace dnas {

enum class SupernetStatus : std::uint8_t { untrained, training, ready, failed };

std::string_view to_string(SupernetStatus status);

struct SupernetState {
    DataConfig data_config;
    SupernetStatus status = SupernetStatus::untrained;
    std::int64_t pretrain_steps = 0;
    /// Backend message when status is failed.
    std::string error;
};

struct CacheOptions {
    std::int64_t pretrain_steps = 30'000;
    std::int64_t finetune_steps = 100;
    /// Upper bound on concurrent backend evaluate calls.
    int max_concurrent_evaluations = 1;
};

struct CacheCounters {
    std::int64_t evaluations = 0;
    std::int64_t evaluation_failures = 0;
    std::int64_t pretrains = 0;
};

/// Lazily prepares one supernet per data configuration and routes every evaluation through
/// the backend. Thread-safe: concurrent ensure_supernet() calls for one key coalesce into a
/// single backend pretrain. `failed` is terminal for the lifetime of the cache.
class SupernetCache {
public:
    SupernetCache(Backend& backend, CacheOptions options = {});

    /// Pretrains on first use, waits while another caller is training. Returns the terminal status.
    SupernetStatus ensure_supernet(const DataConfig& dc);

    /// Throws SupernetFailedError when the config's supernet failed, EvaluationError for backend errors.
    EvalMetrics evaluate(const Candidate& candidate);

    CacheCounters counters() const;
    std::vector<SupernetState> states() const;
    SupernetStatus status(const DataConfig& dc) const;
    const CacheOptions& options() const { return options_; }

private:
    Backend& backend_;
    CacheOptions options_;

    mutable std::mutex mutex_;
    std::condition_variable state_changed_;
    std::map<DataConfig, SupernetState> states_;
    CacheCounters counters_;

    std::mutex slots_mutex_;
    std::condition_variable slot_freed_;
    int in_flight_ = 0;
};

} // namespace dnas
