#include "dnas/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dnas {

std::string_view to_string(Color color) {
    return color == Color::rgb ? "rgb" : "monochrome";
}

std::optional<Color> parse_color(std::string_view text) {
    if (text == "rgb") return Color::rgb;
    if (text == "monochrome" || text == "mono") return Color::monochrome;
    return std::nullopt;
}

std::optional<Alpha> Alpha::from_double(double value) {
    if (!std::isfinite(value)) return std::nullopt;
    const double scaled = value * 10.0;
    const double nearest = std::round(scaled);
    if (std::abs(scaled - nearest) > 1e-9 || std::abs(nearest) > 1e6) return std::nullopt;
    return Alpha{static_cast<int>(nearest)};
}

double effective_alpha(Color color, Alpha alpha) {
    const double a = alpha.value();
    return color == Color::monochrome ? (2.0 / 3.0) * a : a;
}

std::string to_string(const DataConfig& dc) {
    std::ostringstream os;
    os << dc.resolution << "/" << to_string(dc.color);
    return os.str();
}

std::string to_string(const Candidate& c) {
    std::ostringstream os;
    os << to_string(c.data) << " depths=(";
    for (std::size_t i = 0; i < kSearchedStages; ++i) os << (i ? "," : "") << c.model.depths[i];
    os << ") alpha=" << c.model.alpha.value();
    return os.str();
}

int resolution_index(int resolution) {
    const auto it = std::find(kResolutions.begin(), kResolutions.end(), resolution);
    return it == kResolutions.end() ? -1 : static_cast<int>(it - kResolutions.begin());
}

std::optional<std::string> validate(const DataConfig& data) {
    if (resolution_index(data.resolution) < 0)
        return "resolution " + std::to_string(data.resolution) + " not in {32,64,96,128,160,192,224}";
    if (data.color != Color::rgb && data.color != Color::monochrome) return "unknown color encoding";
    return std::nullopt;
}

std::optional<std::string> validate(const ModelConfig& model) {
    for (std::size_t i = 0; i < kSearchedStages; ++i) {
        const int d = model.depths[i];
        if (d < 0 || d > kMaxDepths[i]) {
            return "depth of stage " + std::to_string(i + 3) + " is " + std::to_string(d) +
                   ", allowed 0.." + std::to_string(kMaxDepths[i]);
        }
    }
    for (std::size_t i = 0; i + 1 < kSearchedStages; ++i) {
        if (model.depths[i] == 0 && model.depths[i + 1] != 0) return "block after removed stage";
    }
    if (!model.alpha.valid()) return "alpha " + std::to_string(model.alpha.value()) + " not in {0.1,...,1.0}";
    return std::nullopt;
}

std::optional<std::string> validate(const Candidate& candidate) {
    if (auto v = validate(candidate.data)) return v;
    return validate(candidate.model);
}

Depths repair_depths(Depths depths) {
    bool removed = false;
    for (auto& d : depths) {
        if (removed) d = 0;
        if (d == 0) removed = true;
    }
    return depths;
}

int truncation_point(const Depths& depths) {
    int last = 2;
    for (std::size_t i = 0; i < kSearchedStages; ++i) {
        if (depths[i] == 0) break;
        last = static_cast<int>(i) + 3;
    }
    return last;
}

Candidate random_candidate(Rng& rng, const GeneLocks& locks) {
    Candidate c;
    std::uniform_int_distribution<std::size_t> pick_res(0, kResolutions.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_color(0, kColors.size() - 1);
    const int res = kResolutions[pick_res(rng)];
    const Color color = kColors[pick_color(rng)];
    c.data.resolution = locks.resolution.value_or(res);
    c.data.color = locks.color.value_or(color);

    std::uniform_int_distribution<int> pick_truncation(2, 7);
    const int last = pick_truncation(rng);
    for (std::size_t i = 0; i < kSearchedStages; ++i) {
        const int stage = static_cast<int>(i) + 3;
        if (stage <= last) {
            std::uniform_int_distribution<int> pick_depth(1, kMaxDepths[i]);
            c.model.depths[i] = pick_depth(rng);
        } else {
            c.model.depths[i] = 0;
        }
    }
    std::uniform_int_distribution<int> pick_alpha(Alpha::kMinTenths, Alpha::kMaxTenths);
    c.model.alpha = Alpha{pick_alpha(rng)};
    return c;
}

std::vector<DataConfig> enumerate_data_configs() {
    std::vector<DataConfig> out;
    out.reserve(kResolutions.size() * kColors.size());
    for (int r : kResolutions)
        for (Color c : kColors) out.push_back({r, c});
    return out;
}

} // namespace dnas
