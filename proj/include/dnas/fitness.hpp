#pragma once

#include <array>
#include <cstdint>

#include "dnas/resource_estimator.hpp"

namespace dnas {

struct EvalMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;

    bool in_unit_range() const;
    friend bool operator==(const EvalMetrics&, const EvalMetrics&) = default;
};

/// Memory budget of the target device, in bytes.
struct Constraints {
    std::int64_t max_ram = 0;
    std::int64_t max_flash = 0;

    bool valid() const { return max_ram > 0 && max_flash > 0; }
    friend bool operator==(const Constraints&, const Constraints&) = default;
};

/// w1..w5 for accuracy, precision, recall, RAM term, flash term.
struct FitnessWeights {
    std::array<double, 5> w{0.2, 0.2, 0.2, 0.2, 0.2};

    bool valid() const;
    friend bool operator==(const FitnessWeights&, const FitnessWeights&) = default;
};

struct Violations {
    std::int64_t ram = 0;
    std::int64_t flash = 0;
};

/// Excess usage over each budget; zero when within it (the boundary itself does not violate).
Violations violations(const ResourceEstimate& estimate, const Constraints& constraints);

/// Within both budgets.
inline bool feasible(const ResourceEstimate& e, const Constraints& c) {
    return e.ram_bytes <= c.max_ram && e.flash_bytes <= c.max_flash;
}

/// f = w1 a + w2 p + w3 r + w4 (1 - v_r / x_r) + w5 (1 - v_f / x_f).
/// Penalty terms are unbounded below, so gross violators sort under every feasible candidate.
double fitness(const EvalMetrics& metrics, const ResourceEstimate& estimate, const Constraints& constraints,
               const FitnessWeights& weights = {});

} // namespace dnas
