#pragma once

#include "gradest/bounds.hpp"
#include "gradest/experiments.hpp"

#include <json.hpp>

#include <string>

namespace gradest {

/// Shortest decimal form that round-trips to the same double.
std::string format_number(double value);

/// BoundReport as JSON. Unknown fields are null; an empty interval is
/// reported with "interval": "empty".
nlohmann::json to_json(const BoundReport& report, const BoundQuery& query);

/// Experiment specs. Every key is optional and defaults to the struct
/// defaults; unknown keys are rejected.
SweepSpec sweep_spec_from_json(const nlohmann::json& j);
ThetaDistSpec theta_dist_spec_from_json(const nlohmann::json& j);
BoundCheckSpec bound_check_spec_from_json(const nlohmann::json& j);
BenchSpec bench_spec_from_json(const nlohmann::json& j);

/// Parses "FFD", "gsg", ... or throws std::invalid_argument.
Method method_from_string(const std::string& name);
DirectionScheme scheme_from_string(const std::string& name);
NoiseKind noise_kind_from_string(const std::string& name);
DirectionRule direction_rule_from_string(const std::string& name);

}  // namespace gradest
