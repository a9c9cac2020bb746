#pragma once

// JSON form of a rule base:
//
//   {
//     "variables": [
//       {"name": "front", "role": "input", "universe": [0, 4], "unit": "m",
//        "terms": [{"label": "VeryNear", "kind": "triangle", "points": [0, 0, 0.6]}, ...]}
//     ],
//     "rules": [{"if": [["front", "VeryNear"], ...], "then": [["left_speed", "Stop"], ...]}]
//   }
//
// "role" is optional; a variable named in any "then" clause is an output.

#include <json.hpp>

#include "fuzznav/fuzzy.hpp"

namespace fuzznav::fuzzy {

LinguisticVariable variable_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LinguisticVariable& v, std::string_view role);

Rule rule_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Rule& r);

/// Variables listed in "variables"; rules from "rules" (may be absent).
/// Throws ConfigError on schema violations.
RuleBase rule_base_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RuleBase& rb);

}  // namespace fuzznav::fuzzy
