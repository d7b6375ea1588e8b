#include "dnas/resource_estimator.hpp"

#include <algorithm>

#include "dnas/error.hpp"

namespace dnas {

std::int64_t estimate_flash(const LayerGraph& graph, const DatatypeSizes& dtype, std::int64_t overhead_bytes) {
    return count_parameters(graph) * dtype.parameter.bytes_per_element + overhead_bytes;
}

std::int64_t estimate_ram(const LayerGraph& graph, const DatatypeSizes& dtype) {
    if (graph.layers.empty()) throw EstimationError("cannot estimate RAM of an empty layer graph");
    const std::int64_t ts_data = dtype.data.bytes_per_element;
    const std::int64_t ts_act = dtype.activation.bytes_per_element;

    std::int64_t peak = graph.input_size * ts_data + graph.first_layer_output * ts_act;
    for (std::size_t j = 0; j < graph.layers.size(); ++j) {
        const auto& l = graph.layers[j];
        // The first layer reads the raw sample, every later one reads an activation.
        const std::int64_t in_bytes = l.input.elements() * (j == 0 ? ts_data : ts_act);
        peak = std::max(peak, in_bytes + l.output.elements() * ts_act);
    }
    return peak;
}

ResourceEstimate estimate(const LayerGraph& graph, const DatatypeSizes& dtype, std::int64_t flash_overhead) {
    return {estimate_flash(graph, dtype, flash_overhead), estimate_ram(graph, dtype)};
}

} // namespace dnas
