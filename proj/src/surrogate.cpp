#include <algorithm>
#include <cmath>
#include <numeric>

#include "dnas/error.hpp"
#include "dnas/evaluator.hpp"

namespace dnas {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform in [0, 1) from the top 53 bits.
double unit_interval(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

} // namespace

std::uint64_t stable_hash(std::uint64_t seed, const Candidate& c, std::uint64_t stream) {
    std::uint64_t h = splitmix64(seed ^ splitmix64(stream));
    auto mix = [&h](std::uint64_t v) { h = splitmix64(h ^ v); };
    mix(static_cast<std::uint64_t>(c.data.resolution));
    mix(static_cast<std::uint64_t>(c.data.color));
    for (int d : c.model.depths) mix(static_cast<std::uint64_t>(d));
    mix(static_cast<std::uint64_t>(c.model.alpha.tenths()));
    return h;
}

double surrogate_logit(const Candidate& c, const SurrogateParams& p) {
    const int blocks = std::accumulate(c.model.depths.begin(), c.model.depths.end(), 0);
    return p.bias + p.resolution * std::log2(c.data.resolution / 32.0) +
           p.width * effective_alpha(c.data.color, c.model.alpha) + p.depth * blocks +
           (c.data.color == Color::rgb ? p.rgb : 0.0);
}

EvalMetrics surrogate_evaluate(const Candidate& c, const SurrogateParams& p) {
    const double noise = (2.0 * unit_interval(stable_hash(p.seed, c, 0)) - 1.0) * p.noise_amplitude;
    const double accuracy = 0.5 + 0.45 * sigmoid(surrogate_logit(c, p) + noise);
    auto offset = [&](std::uint64_t stream) { return (2.0 * unit_interval(stable_hash(p.seed, c, stream)) - 1.0) * 0.02; };
    return {accuracy, std::clamp(accuracy + offset(1), 0.0, 1.0), std::clamp(accuracy + offset(2), 0.0, 1.0)};
}

void SurrogateBackend::pretrain(const DataConfig& data, std::int64_t steps) {
    std::lock_guard lock(mutex_);
    pretrained_.insert(data);
    pretrain_steps_ += steps;
}

EvalMetrics SurrogateBackend::evaluate(const Candidate& candidate, std::int64_t finetune_steps) {
    {
        std::lock_guard lock(mutex_);
        if (!pretrained_.contains(candidate.data))
            throw EvaluationError("supernet not trained for " + to_string(candidate.data));
        finetune_steps_ += finetune_steps;
    }
    return surrogate_evaluate(candidate, params_);
}

std::int64_t SurrogateBackend::pretrain_steps_seen() const {
    std::lock_guard lock(mutex_);
    return pretrain_steps_;
}

std::int64_t SurrogateBackend::finetune_steps_seen() const {
    std::lock_guard lock(mutex_);
    return finetune_steps_;
}

std::unique_ptr<Backend> make_backend(const std::string& name, const SurrogateParams& surrogate,
                                      const ExternalBackendOptions& external) {
    if (name == "surrogate") return std::make_unique<SurrogateBackend>(surrogate);
    if (name == "external") {
        if (external.command.empty()) throw ConfigError("external evaluator needs a backend command");
        return std::make_unique<ExternalBackend>(external);
    }
    throw ConfigError("unknown evaluator '" + name + "' (expected surrogate or external)");
}

} // namespace dnas
