#include "dnas/supernet_cache.hpp"

#include <algorithm>

#include "dnas/error.hpp"

namespace dnas {

std::string_view to_string(SupernetStatus status) {
    switch (status) {
    case SupernetStatus::untrained: return "untrained";
    case SupernetStatus::training: return "training";
    case SupernetStatus::ready: return "ready";
    case SupernetStatus::failed: return "failed";
    }
    return "?";
}

SupernetCache::SupernetCache(Backend& backend, CacheOptions options) : backend_(backend), options_(options) {
    if (options_.pretrain_steps < 0 || options_.finetune_steps < 0) throw ConfigError("step counts must be >= 0");
    options_.max_concurrent_evaluations = std::max(1, options_.max_concurrent_evaluations);
}

SupernetStatus SupernetCache::ensure_supernet(const DataConfig& dc) {
    if (auto v = validate(dc)) throw InvalidCandidateError(*v);

    std::unique_lock lock(mutex_);
    auto [it, inserted] = states_.try_emplace(dc, SupernetState{dc, SupernetStatus::untrained, 0, {}});
    SupernetState& state = it->second;
    if (state.status == SupernetStatus::training) {
        state_changed_.wait(lock, [&] { return state.status != SupernetStatus::training; });
        return state.status;
    }
    if (state.status != SupernetStatus::untrained) return state.status;

    state.status = SupernetStatus::training;
    state.pretrain_steps = options_.pretrain_steps;
    ++counters_.pretrains;
    lock.unlock();

    SupernetStatus result = SupernetStatus::ready;
    std::string error;
    try {
        backend_.pretrain(dc, options_.pretrain_steps);
    } catch (const std::exception& e) {
        result = SupernetStatus::failed;
        error = e.what();
    }

    lock.lock();
    state.status = result;
    state.error = std::move(error);
    lock.unlock();
    state_changed_.notify_all();
    return result;
}

EvalMetrics SupernetCache::evaluate(const Candidate& candidate) {
    if (auto v = validate(candidate)) throw InvalidCandidateError(*v);

    auto record_failure = [this] {
        std::lock_guard lock(mutex_);
        ++counters_.evaluations;
        ++counters_.evaluation_failures;
    };

    if (ensure_supernet(candidate.data) != SupernetStatus::ready) {
        record_failure();
        throw SupernetFailedError("supernet for " + to_string(candidate.data) + " failed to train");
    }

    {
        std::unique_lock slots(slots_mutex_);
        slot_freed_.wait(slots, [&] { return in_flight_ < options_.max_concurrent_evaluations; });
        ++in_flight_;
    }
    auto release = [this] {
        {
            std::lock_guard slots(slots_mutex_);
            --in_flight_;
        }
        slot_freed_.notify_one();
    };

    EvalMetrics metrics;
    try {
        metrics = backend_.evaluate(candidate, options_.finetune_steps);
    } catch (const EvaluationError&) {
        release();
        record_failure();
        throw;
    } catch (const std::exception& e) {
        release();
        record_failure();
        throw EvaluationError("evaluate of " + to_string(candidate) + ": " + e.what());
    }
    release();

    if (!metrics.in_unit_range()) {
        record_failure();
        throw EvaluationError("backend returned metrics outside [0, 1] for " + to_string(candidate));
    }
    std::lock_guard lock(mutex_);
    ++counters_.evaluations;
    return metrics;
}

CacheCounters SupernetCache::counters() const {
    std::lock_guard lock(mutex_);
    return counters_;
}

std::vector<SupernetState> SupernetCache::states() const {
    std::lock_guard lock(mutex_);
    std::vector<SupernetState> out;
    out.reserve(states_.size());
    for (const auto& [dc, state] : states_) out.push_back(state);
    return out;
}

SupernetStatus SupernetCache::status(const DataConfig& dc) const {
    std::lock_guard lock(mutex_);
    const auto it = states_.find(dc);
    return it == states_.end() ? SupernetStatus::untrained : it->second.status;
}

} // namespace dnas
