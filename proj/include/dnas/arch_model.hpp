#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "dnas/search_space.hpp"

namespace dnas {

enum class LayerKind : std::uint8_t { standard_conv, depthwise_conv, pointwise_conv, pooling, dense };

std::string_view to_string(LayerKind kind);

/// Tensor shape in elements, height x width x channels.
struct Shape {
    std::int64_t height = 1;
    std::int64_t width = 1;
    std::int64_t channels = 1;

    constexpr std::int64_t elements() const { return height * width * channels; }
    friend constexpr bool operator==(const Shape&, const Shape&) = default;
};

struct LayerSpec {
    LayerKind kind = LayerKind::standard_conv;
    Shape input;
    Shape output;
    std::int64_t param_count = 0;
    int kernel = 1;
    int stride = 1;
    /// 0 for stem, 1..7 for block stages, 8 for the head.
    int stage = 0;
};

/// An instantiated architecture, ordered from input to classifier.
struct LayerGraph {
    std::vector<LayerSpec> layers;
    /// Element count of the network input (resolution^2 x channels).
    std::int64_t input_size = 0;
    /// Element count of the first layer's output.
    std::int64_t first_layer_output = 0;
};

/// Per-stage recipe of the MobileNetV2 backbone.
struct StageRecipe {
    int expansion;
    int base_channels;
    int stride;
};

/// Stages 1..7. Stages 1-2 always run at their standard depths (1 and 2 blocks).
inline constexpr std::array<StageRecipe, 7> kStageRecipes{{
    {1, 16, 1},
    {6, 24, 2},
    {6, 32, 2},
    {6, 64, 2},
    {6, 96, 1},
    {6, 160, 2},
    {6, 320, 1},
}};
inline constexpr std::array<int, 2> kFixedStageDepths{1, 2};
inline constexpr int kStemChannels = 32;
inline constexpr int kHeadChannels = 1280;
inline constexpr int kMinHeadChannels = 8;
inline constexpr int kClasses = 2;

/// max(1, round(base * alpha_eff)), computed in exact integer arithmetic.
int scaled_channels(int base, Color color, Alpha alpha);

/// Builds the layer graph of a valid candidate. Throws InvalidCandidateError otherwise.
LayerGraph instantiate(const Candidate& candidate);

std::int64_t count_parameters(std::span<const LayerSpec> layers);
inline std::int64_t count_parameters(const LayerGraph& graph) { return count_parameters(graph.layers); }

/// Human-readable layer table.
void print_layer_table(std::ostream& os, const LayerGraph& graph);

} // namespace dnas
