#include "dnas/serialization.hpp"

#include "dnas/error.hpp"

namespace dnas {

namespace {
constexpr std::array<const char*, kSearchedStages> kDepthKeys{"b3", "b4", "b5", "b6", "b7"};
}

nlohmann::ordered_json candidate_to_json(const Candidate& c) {
    nlohmann::ordered_json j;
    j["resolution"] = c.data.resolution;
    j["color"] = std::string(to_string(c.data.color));
    for (std::size_t i = 0; i < kSearchedStages; ++i) j[kDepthKeys[i]] = c.model.depths[i];
    j["alpha"] = c.model.alpha.value();
    return j;
}

Candidate candidate_from_json(const nlohmann::ordered_json& j) {
    Candidate c;
    try {
        c.data.resolution = j.at("resolution").get<int>();
        const auto color = parse_color(j.at("color").get<std::string>());
        if (!color) throw InvalidCandidateError("unknown color '" + j.at("color").get<std::string>() + "'");
        c.data.color = *color;
        for (std::size_t i = 0; i < kSearchedStages; ++i) c.model.depths[i] = j.at(kDepthKeys[i]).get<int>();
        const auto alpha = Alpha::from_double(j.at("alpha").get<double>());
        if (!alpha) throw InvalidCandidateError("alpha is not a multiple of 0.1");
        c.model.alpha = *alpha;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidCandidateError(std::string("malformed candidate record: ") + e.what());
    }
    if (auto v = validate(c)) throw InvalidCandidateError(*v);
    return c;
}

nlohmann::ordered_json data_config_to_json(const DataConfig& dc) {
    return {{"resolution", dc.resolution}, {"color", std::string(to_string(dc.color))}};
}

} // namespace dnas
