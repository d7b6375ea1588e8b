#pragma once

#include <json.hpp>

#include "dnas/fitness.hpp"
#include "dnas/search_space.hpp"

namespace dnas {

/// Flat record {resolution, color, b3, b4, b5, b6, b7, alpha}.
nlohmann::ordered_json candidate_to_json(const Candidate& c);
/// Inverse of candidate_to_json. Throws InvalidCandidateError on missing fields or out-of-space values.
Candidate candidate_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json data_config_to_json(const DataConfig& dc);

} // namespace dnas
