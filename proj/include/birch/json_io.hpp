#pragma once

#include <nlohmann/json.hpp>

#include "birch/character.hpp"
#include "birch/integrate.hpp"
#include "birch/path.hpp"

namespace birch {

constexpr int kSchemaVersion = 1;

nlohmann::json character_to_json(const Character& a);
Character character_from_json(const nlohmann::json& j);

nlohmann::json path_to_json(const BranchedRoughPath& x);

nlohmann::json integral_report_json(double s, double t, const FullIntegralResult& y,
                                    const LocalApproximant& approx,
                                    const std::vector<ErrorRow>& errors, double pvar_y);

}  // namespace birch
