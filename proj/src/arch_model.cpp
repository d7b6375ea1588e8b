#include "dnas/arch_model.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "dnas/error.hpp"

namespace dnas {

std::string_view to_string(LayerKind kind) {
    switch (kind) {
    case LayerKind::standard_conv: return "conv";
    case LayerKind::depthwise_conv: return "depthwise";
    case LayerKind::pointwise_conv: return "pointwise";
    case LayerKind::pooling: return "pooling";
    case LayerKind::dense: return "dense";
    }
    return "?";
}

int scaled_channels(int base, Color color, Alpha alpha) {
    // alpha_eff = tenths/10 (rgb) or tenths/15 (monochrome); round half up on the exact rational.
    const std::int64_t num = static_cast<std::int64_t>(base) * alpha.tenths();
    const std::int64_t den = color == Color::rgb ? 10 : 15;
    const auto rounded = static_cast<int>((2 * num + den) / (2 * den));
    return std::max(1, rounded);
}

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

class GraphBuilder {
public:
    explicit GraphBuilder(Shape input) : current_(input) {}

    void conv(LayerKind kind, int kernel, int stride, std::int64_t out_channels, int stage) {
        LayerSpec l;
        l.kind = kind;
        l.kernel = kernel;
        l.stride = stride;
        l.stage = stage;
        l.input = current_;
        l.output = {ceil_div(current_.height, stride), ceil_div(current_.width, stride), out_channels};
        const std::int64_t k2 = static_cast<std::int64_t>(kernel) * kernel;
        if (kind == LayerKind::depthwise_conv) {
            l.output.channels = current_.channels;
            l.param_count = k2 * current_.channels + current_.channels;
        } else {
            l.param_count = k2 * current_.channels * out_channels + out_channels;
        }
        push(l);
    }

    void global_pool(int stage) {
        LayerSpec l;
        l.kind = LayerKind::pooling;
        l.kernel = static_cast<int>(current_.height);
        l.stage = stage;
        l.input = current_;
        l.output = {1, 1, current_.channels};
        push(l);
    }

    void dense(std::int64_t outputs, int stage) {
        LayerSpec l;
        l.kind = LayerKind::dense;
        l.stage = stage;
        l.input = current_;
        l.output = {1, 1, outputs};
        l.param_count = current_.elements() * outputs + outputs;
        push(l);
    }

    std::int64_t channels() const { return current_.channels; }
    std::vector<LayerSpec> take() { return std::move(layers_); }

private:
    void push(const LayerSpec& l) {
        layers_.push_back(l);
        current_ = l.output;
    }

    Shape current_;
    std::vector<LayerSpec> layers_;
};

} // namespace

LayerGraph instantiate(const Candidate& candidate) {
    if (auto violation = validate(candidate)) {
        throw InvalidCandidateError("cannot instantiate " + to_string(candidate) + ": " + *violation);
    }
    const Color color = candidate.data.color;
    const Alpha alpha = candidate.model.alpha;
    const Shape input{candidate.data.resolution, candidate.data.resolution, channel_count(color)};

    GraphBuilder b(input);
    b.conv(LayerKind::standard_conv, 3, 2, scaled_channels(kStemChannels, color, alpha), 0);

    auto stage_depth = [&](std::size_t stage_index) {
        return stage_index < kFixedStageDepths.size() ? kFixedStageDepths[stage_index]
                                                      : candidate.model.depths[stage_index - kFixedStageDepths.size()];
    };

    for (std::size_t s = 0; s < kStageRecipes.size(); ++s) {
        const auto& recipe = kStageRecipes[s];
        const int depth = stage_depth(s);
        if (depth == 0) break; // suffix-zero: nothing follows a removed stage
        const int out_channels = scaled_channels(recipe.base_channels, color, alpha);
        const int stage = static_cast<int>(s) + 1;
        for (int block = 0; block < depth; ++block) {
            const int stride = block == 0 ? recipe.stride : 1;
            const std::int64_t hidden = b.channels() * recipe.expansion;
            if (recipe.expansion != 1) b.conv(LayerKind::pointwise_conv, 1, 1, hidden, stage);
            b.conv(LayerKind::depthwise_conv, 3, stride, hidden, stage);
            b.conv(LayerKind::pointwise_conv, 1, 1, out_channels, stage);
        }
    }

    const int head = std::max(kMinHeadChannels, scaled_channels(kHeadChannels, color, alpha));
    b.conv(LayerKind::pointwise_conv, 1, 1, head, 8);
    b.global_pool(8);
    b.dense(kClasses, 8);

    LayerGraph g;
    g.layers = b.take();
    g.input_size = input.elements();
    g.first_layer_output = g.layers.front().output.elements();
    return g;
}

std::int64_t count_parameters(std::span<const LayerSpec> layers) {
    std::int64_t total = 0;
    for (const auto& l : layers) total += l.param_count;
    return total;
}

void print_layer_table(std::ostream& os, const LayerGraph& graph) {
    auto shape = [](const Shape& s) {
        return std::to_string(s.height) + "x" + std::to_string(s.width) + "x" + std::to_string(s.channels);
    };
    os << std::left << std::setw(4) << "#" << std::setw(7) << "stage" << std::setw(11) << "kind" << std::setw(8)
       << "kernel" << std::setw(8) << "stride" << std::setw(16) << "input" << std::setw(16) << "output"
       << std::right << std::setw(10) << "params" << '\n';
    for (std::size_t i = 0; i < graph.layers.size(); ++i) {
        const auto& l = graph.layers[i];
        const std::string stage = l.stage == 0 ? "stem" : l.stage == 8 ? "head" : std::to_string(l.stage);
        os << std::left << std::setw(4) << i << std::setw(7) << stage << std::setw(11) << to_string(l.kind)
           << std::setw(8) << l.kernel << std::setw(8) << l.stride << std::setw(16) << shape(l.input)
           << std::setw(16) << shape(l.output) << std::right << std::setw(10) << l.param_count << '\n';
    }
}

} // namespace dnas
