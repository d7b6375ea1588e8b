#pragma once

// Test-only O(n^2) non-dominance check over (accuracy up, RAM down, flash down).

#include <cstddef>
#include <vector>

#include "dnas/evolution.hpp"

namespace oracle {

inline bool beats(const dnas::EvaluatedCandidate& a, const dnas::EvaluatedCandidate& b) {
    const bool no_worse = a.metrics->accuracy >= b.metrics->accuracy && a.estimate.ram_bytes <= b.estimate.ram_bytes &&
                          a.estimate.flash_bytes <= b.estimate.flash_bytes;
    const bool better = a.metrics->accuracy > b.metrics->accuracy || a.estimate.ram_bytes < b.estimate.ram_bytes ||
                        a.estimate.flash_bytes < b.estimate.flash_bytes;
    return no_worse && better;
}

/// eval_index values of the non-dominated successful records, in input order.
inline std::vector<std::uint64_t> pareto_indices(const std::vector<dnas::EvaluatedCandidate>& records) {
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].metrics) continue;
        bool dominated = false;
        for (std::size_t j = 0; j < records.size() && !dominated; ++j)
            dominated = j != i && records[j].metrics && beats(records[j], records[i]);
        if (!dominated) out.push_back(records[i].eval_index);
    }
    return out;
}

} // namespace oracle
