#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "dnas/fitness.hpp"
#include "dnas/search_space.hpp"

namespace dnas {

/// Training backend contract. evaluate() for a data configuration may only follow a
/// successful pretrain() of that configuration; SupernetCache enforces the ordering.
class Backend {
public:
    virtual ~Backend() = default;

    /// Trains the supernet for `data`. Throws EvaluationError (or a subclass) on failure.
    virtual void pretrain(const DataConfig& data, std::int64_t steps) = 0;

    /// Fine-tunes and scores the sub-network for `candidate`.
    virtual EvalMetrics evaluate(const Candidate& candidate, std::int64_t finetune_steps) = 0;
};

struct SurrogateParams {
    double bias = -1.0;
    /// Per doubling of resolution over 32.
    double resolution = 0.35;
    /// Per unit of effective alpha.
    double width = 1.2;
    /// Per searched block.
    double depth = 0.08;
    double rgb = 0.25;
    double noise_amplitude = 0.05;
    std::uint64_t seed = 0;
};

/// 64-bit hash of (seed, genome) that is stable across platforms and runs.
std::uint64_t stable_hash(std::uint64_t seed, const Candidate& candidate, std::uint64_t stream = 0);

/// Closed-form stand-in for supernet fine-tuning. Deterministic in (params, candidate).
EvalMetrics surrogate_evaluate(const Candidate& candidate, const SurrogateParams& params);

/// The latent score z before the sigmoid, without noise.
double surrogate_logit(const Candidate& candidate, const SurrogateParams& params);

class SurrogateBackend final : public Backend {
public:
    explicit SurrogateBackend(SurrogateParams params = {}) : params_(params) {}

    void pretrain(const DataConfig& data, std::int64_t steps) override;
    EvalMetrics evaluate(const Candidate& candidate, std::int64_t finetune_steps) override;

    const SurrogateParams& params() const { return params_; }
    /// Step counts seen so far; the surrogate ignores them otherwise.
    std::int64_t pretrain_steps_seen() const;
    std::int64_t finetune_steps_seen() const;

private:
    SurrogateParams params_;
    mutable std::mutex mutex_;
    std::set<DataConfig> pretrained_;
    std::int64_t pretrain_steps_ = 0;
    std::int64_t finetune_steps_ = 0;
};

struct ExternalBackendOptions {
    /// argv of the worker process; argv[0] is looked up on PATH.
    std::vector<std::string> command;
    std::chrono::milliseconds pretrain_timeout{std::chrono::hours(24)};
    std::chrono::milliseconds evaluate_timeout{std::chrono::hours(1)};
};

/// Talks newline-delimited JSON to a worker process over its stdin/stdout.
/// One request is in flight at a time. The worker is (re)started lazily and killed after a
/// timeout, since its stream can no longer be trusted.
class ExternalBackend final : public Backend {
public:
    explicit ExternalBackend(ExternalBackendOptions options);
    ~ExternalBackend() override;

    ExternalBackend(const ExternalBackend&) = delete;
    ExternalBackend& operator=(const ExternalBackend&) = delete;

    /// Spawns the worker now instead of on first request. Throws EvaluationError if it cannot start.
    void start();

    void pretrain(const DataConfig& data, std::int64_t steps) override;
    EvalMetrics evaluate(const Candidate& candidate, std::int64_t finetune_steps) override;

private:
    struct Process;

    std::string next_request_id();
    /// Sends one request line and waits for one response line. Caller holds mutex_.
    std::string round_trip(const std::string& request_line, std::chrono::milliseconds timeout, const std::string& what);
    void spawn();
    void stop();

    ExternalBackendOptions options_;
    std::mutex mutex_;
    std::unique_ptr<Process> process_;
    std::uint64_t counter_ = 0;
};

/// Builds the backend named in a run configuration ("surrogate" or "external").
std::unique_ptr<Backend> make_backend(const std::string& name, const SurrogateParams& surrogate,
                                      const ExternalBackendOptions& external);

} // namespace dnas
