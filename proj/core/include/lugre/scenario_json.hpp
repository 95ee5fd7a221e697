#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "lugre/sim.hpp"

namespace lugre {

/// Invalid or unparsable configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses a scenario from JSON text and validates it. Throws ConfigError.
ScenarioConfig parse_scenario_json(std::string_view text);

/// Reads and parses a scenario file. Throws ConfigError.
ScenarioConfig load_scenario(const std::filesystem::path& path);

std::string scenario_to_json_string(const ScenarioConfig& cfg, int indent = 2);

/// Replaces the numeric field addressed by a dotted path (e.g.
/// "observer.alpha", "controller.Ki", "dt") in a JSON document and returns the
/// updated text. Throws ConfigError if the path does not address a number.
std::string set_json_number_field(std::string_view text, std::string_view dotted_path,
                                  double value);

}  // namespace lugre
