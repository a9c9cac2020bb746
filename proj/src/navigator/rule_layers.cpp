#include "fuzznav/rule_layers.hpp"

#include "fuzznav/fuzzy.hpp"

namespace fuzznav::nav {

using nlohmann::json;

namespace {

void expand(const json& antecedent, std::size_t k, json& prefix, const json& then, json& out) {
  if (k == antecedent.size()) {
    out.push_back({{"if", prefix}, {"then", then}});
    return;
  }
  const json& clause = antecedent[k];
  if (!clause.is_array() || clause.size() != 2 || !clause[0].is_string()) {
    throw fuzzy::ConfigError("layer clause must be [variable, term] or [variable, [terms...]]");
  }
  if (clause[1].is_array()) {
    if (clause[1].empty()) throw fuzzy::ConfigError("empty term list for '" + clause[0].get<std::string>() + "'");
    for (const auto& term : clause[1]) {
      prefix.push_back(json::array({clause[0], term}));
      expand(antecedent, k + 1, prefix, then, out);
      prefix.erase(prefix.size() - 1);
    }
  } else {
    prefix.push_back(clause);
    expand(antecedent, k + 1, prefix, then, out);
    prefix.erase(prefix.size() - 1);
  }
}

}  // namespace

json expand_rule_layers(const json& layers) {
  json out = json::array();
  if (!layers.is_array()) throw fuzzy::ConfigError("\"layers\" must be an array");
  for (const auto& layer : layers) {
    if (!layer.contains("rules") || !layer.at("rules").is_array()) {
      throw fuzzy::ConfigError("layer '" + layer.value("name", std::string("?")) + "' has no rule list");
    }
    for (const auto& rule : layer.at("rules")) {
      if (!rule.contains("if") || !rule.contains("then") || !rule.at("if").is_array()) {
        throw fuzzy::ConfigError("layer rule needs \"if\" and \"then\"");
      }
      json prefix = json::array();
      expand(rule.at("if"), 0, prefix, rule.at("then"), out);
    }
  }
  return out;
}

std::vector<std::string> layer_names(const json& doc) {
  std::vector<std::string> names;
  if (doc.contains("layers")) {
    for (const auto& layer : doc.at("layers")) names.push_back(layer.value("name", std::string{}));
  }
  return names;
}

json without_layer(const json& doc, const std::string& name) {
  json copy = doc;
  if (!copy.contains("layers")) return copy;
  json kept = json::array();
  for (const auto& layer : copy.at("layers")) {
    if (layer.value("name", std::string{}) != name) kept.push_back(layer);
  }
  copy["layers"] = kept;
  return copy;
}

}  // namespace fuzznav::nav
