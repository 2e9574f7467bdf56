#pragma once

#include <nlohmann/json.hpp>

#include "zofd/objective.hpp"
#include "zofd/smoothing.hpp"

namespace zofd {

void to_json(nlohmann::json& j, const SmoothingReport& r);
void from_json(const nlohmann::json& j, SmoothingReport& r);
void to_json(nlohmann::json& j, const UnbiasednessResult& r);

/// {"name", "d", "seed", "params"}.
void to_json(nlohmann::json& j, const ProblemSpec& spec);
void from_json(const nlohmann::json& j, ProblemSpec& spec);

}  // namespace zofd
