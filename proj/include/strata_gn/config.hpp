#pragma once

#include "strata_gn/coeffs.hpp"
#include "strata_gn/evolution.hpp"
#include "strata_gn/grid.hpp"
#include "strata_gn/params.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace strata_gn {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    ModelParams params;
    Floors floors;
    CoeffOptions coeff;
    int n = 256;
    double length = 20.0 * std::numbers::pi;
    nlohmann::json bathymetry = {{"type", "flat"}, {"offset", 0.5}};
    nlohmann::json initial = {{"type", "zero"}};
    SimConfig sim;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
};

// every key with its default value; doubles as the schema
nlohmann::json default_config_json();

// merge a user document over the defaults; unknown keys are rejected
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

// "a.b.c=value"; value is read as JSON when it parses, as a string otherwise
void apply_override(nlohmann::json& doc, const std::string& assignment);

nlohmann::json to_json(const RunConfig& cfg);
nlohmann::json to_json(const ModelParams& p);
ModelParams params_from_json(const nlohmann::json& j);

PeriodicGrid make_grid(const RunConfig& cfg);
Bathymetry make_bathymetry(const PeriodicGrid& grid, const nlohmann::json& spec);
// generators: zero, gaussian, mode, csv
State make_initial(const PeriodicGrid& grid, const nlohmann::json& spec, const ModelParams& p);

}  // namespace strata_gn
