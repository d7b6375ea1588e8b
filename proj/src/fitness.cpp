#include "dnas/fitness.hpp"

#include <algorithm>
#include <cmath>

namespace dnas {

bool EvalMetrics::in_unit_range() const {
    auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    return unit(accuracy) && unit(precision) && unit(recall);
}

bool FitnessWeights::valid() const {
    return std::all_of(w.begin(), w.end(), [](double x) { return std::isfinite(x) && x >= 0.0; });
}

namespace {

/// Compensated dot product (fma product errors plus TwoSum), about as accurate as doubled precision.
double dot(const std::array<double, 5>& a, const std::array<double, 5>& b) {
    double sum = 0.0;
    double carry = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double p = a[i] * b[i];
        const double p_err = std::fma(a[i], b[i], -p);
        const double t = sum + p;
        const double z = t - sum;
        carry += (sum - (t - z)) + (p - z) + p_err;
        sum = t;
    }
    return sum + carry;
}

} // namespace

Violations violations(const ResourceEstimate& estimate, const Constraints& constraints) {
    return {std::max<std::int64_t>(0, estimate.ram_bytes - constraints.max_ram),
            std::max<std::int64_t>(0, estimate.flash_bytes - constraints.max_flash)};
}

double fitness(const EvalMetrics& m, const ResourceEstimate& estimate, const Constraints& c,
               const FitnessWeights& weights) {
    const auto v = violations(estimate, c);
    const auto& w = weights.w;
    const double ram_term = 1.0 - static_cast<double>(v.ram) / static_cast<double>(c.max_ram);
    const double flash_term = 1.0 - static_cast<double>(v.flash) / static_cast<double>(c.max_flash);
    const std::array<double, 5> terms{m.accuracy, m.precision, m.recall, ram_term, flash_term};
    return dot(w, terms);
}

} // namespace dnas
