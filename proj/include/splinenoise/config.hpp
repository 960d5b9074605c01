#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "splinenoise/experiment.hpp"

namespace splinenoise {

/// Parses an experiment configuration. Every field is required; grids are
/// given either as an explicit array or as {"start", "stop", "count"}.
/// A run manifest is accepted transparently: when the top-level object has
/// a "config" key, that sub-object is parsed instead.
ExperimentConfig parse_config(const nlohmann::json& j);

ExperimentConfig load_config(const std::filesystem::path& path);

/// Round-trippable echo of a configuration with fully resolved grids.
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

}  // namespace splinenoise
