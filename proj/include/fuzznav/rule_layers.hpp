#pragma once

// Layered rule templates. A layer is {"name": ..., "rules": [...]} where each
// rule has the flat-rule shape except that an antecedent clause may list
// several terms, ["obstacle_left", ["Near", "Far"]]; such a template expands
// into one flat rule per combination of listed terms.

#include <string>
#include <vector>

#include <json.hpp>

namespace fuzznav::nav {

/// Flat rules of every layer, in layer order.
nlohmann::json expand_rule_layers(const nlohmann::json& layers);

std::vector<std::string> layer_names(const nlohmann::json& doc);

/// Copy of the engine document without the named layer.
nlohmann::json without_layer(const nlohmann::json& doc, const std::string& name);

}  // namespace fuzznav::nav
