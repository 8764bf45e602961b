#pragma once
// JSON scenario files: the serialized form of a DesignQuery plus the
// solver-specific extras (target power, n, cost block, sweep axes).

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "longidesign/allocation.hpp"
#include "longidesign/types.hpp"

namespace longidesign {

struct SweepAxis {
    std::string path;            // dotted field path, e.g. "covariance.rho"
    std::vector<double> values;  // cross-product over all axes
};

struct Scenario {
    DesignQuery query;
    std::optional<double> target_power;
    std::optional<double> n;
    std::optional<CostSpec> cost;
    std::optional<int> r_max;
    std::vector<SweepAxis> sweep;
    std::string sweep_solve;  // subcommand evaluated per sweep cell
    nlohmann::json raw;       // the validated document (defaults applied)
};

// Strict parse: unknown keys rejected, validation errors name the exact
// field path, defaults (alpha = 0.05) are applied and echoed in `raw`.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario parse_scenario_file(const std::string& path);

// Serialize a query back to the scenario schema (round-trips through parse).
nlohmann::json scenario_to_json(const Scenario& sc);

}  // namespace longidesign
