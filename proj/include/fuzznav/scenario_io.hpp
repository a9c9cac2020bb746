#pragma once

// Scenario documents: JSON, "schema_version": 1, every dimensioned field
// written with its unit, either "0.01 s" or {"value": 0.01, "unit": "s"}.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "fuzznav/sim.hpp"

namespace fuzznav::sim {

inline constexpr int kSchemaVersion = 1;

enum class Dimension {
  Length,
  Time,
  Angle,
  AngularVelocity,
  Velocity,
  Frequency,
  Voltage,
  Resistance,
  Inductance,
  Mass,
  Inertia,
  TorqueConstant,
  BackEmf,
  Damping,
  Gain
};

/// Value in SI units. Bare numbers, unknown units and units of another
/// dimension raise ScenarioError naming the field path.
double parse_quantity(const nlohmann::json& v, Dimension dim, const std::string& path);

/// Parses JSON text; syntax errors raise ScenarioError as "source:line:column: message".
nlohmann::json parse_json_text(const std::string& text, const std::string& source);

/// Relative engine paths resolve against base_dir. Unknown keys are errors.
Scenario scenario_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json scenario_to_json(const Scenario& s);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace fuzznav::sim
