#pragma once

#include <cstdint>

#include "dnas/arch_model.hpp"

namespace dnas {

/// Bytes per stored element (t_s). 8-bit storage is the default.
struct DatatypeSize {
    std::int64_t bytes_per_element = 1;
};

/// Separate element sizes for input data, activations and parameters.
/// Constructing from a single DatatypeSize applies it to all three roles.
struct DatatypeSizes {
    DatatypeSize data{};
    DatatypeSize activation{};
    DatatypeSize parameter{};

    DatatypeSizes() = default;
    DatatypeSizes(DatatypeSize all) : data(all), activation(all), parameter(all) {} // NOLINT(implicit)
};

struct ResourceEstimate {
    std::int64_t flash_bytes = 0;
    std::int64_t ram_bytes = 0;

    friend bool operator==(const ResourceEstimate&, const ResourceEstimate&) = default;
};

/// Flash storage: sum of parameters times the parameter size, plus a fixed application overhead.
std::int64_t estimate_flash(const LayerGraph& graph, const DatatypeSizes& dtype = {}, std::int64_t overhead_bytes = 0);

/// Peak working memory under the streaming paradigm (one sample resident):
///   max(d + l_1o, max_j (l_ji + l_jo)) * t_s
/// with every term an element count. Throws EstimationError on an empty graph.
std::int64_t estimate_ram(const LayerGraph& graph, const DatatypeSizes& dtype = {});

ResourceEstimate estimate(const LayerGraph& graph, const DatatypeSizes& dtype = {}, std::int64_t flash_overhead = 0);

} // namespace dnas
