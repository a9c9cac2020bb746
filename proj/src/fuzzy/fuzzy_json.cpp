#include "fuzznav/fuzzy_json.hpp"

#include <set>

namespace fuzznav::fuzzy {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  return j.at(key);
}

std::vector<Clause> clauses_from_json(const json& j, const char* where) {
  if (!j.is_array()) throw ConfigError(std::string("rule '") + where + "' must be an array of [variable, term]");
  std::vector<Clause> out;
  for (const auto& c : j) {
    if (!c.is_array() || c.size() != 2 || !c[0].is_string() || !c[1].is_string()) {
      throw ConfigError(std::string("rule '") + where + "' clause must be [variable, term]");
    }
    out.push_back({c[0].get<std::string>(), c[1].get<std::string>()});
  }
  return out;
}

json clauses_to_json(const std::vector<Clause>& cs) {
  json arr = json::array();
  for (const auto& c : cs) arr.push_back({c.variable, c.term});
  return arr;
}

}  // namespace

LinguisticVariable variable_from_json(const json& j) {
  const std::string name = require(j, "name", "variable").get<std::string>();
  const std::string where = "variable '" + name + "'";
  const json& universe = require(j, "universe", where);
  if (!universe.is_array() || universe.size() != 2 || !universe[0].is_number() || !universe[1].is_number()) {
    throw ConfigError(where + ": universe must be [lo, hi]");
  }
  std::vector<Term> terms;
  for (const auto& t : require(j, "terms", where)) {
    const std::string label = require(t, "label", where + " term").get<std::string>();
    const ShapeKind kind = shape_kind_from_string(require(t, "kind", where + " term " + label).get<std::string>());
    const json& pts = require(t, "points", where + " term " + label);
    if (!pts.is_array()) throw ConfigError(where + " term " + label + ": points must be an array");
    std::vector<double> points;
    for (const auto& p : pts) {
      if (!p.is_number()) throw ConfigError(where + " term " + label + ": points must be numbers");
      points.push_back(p.get<double>());
    }
    terms.push_back({label, MembershipFunction::make(kind, points)});
  }
  return {name, universe[0].get<double>(), universe[1].get<double>(), j.value("unit", std::string{}), std::move(terms)};
}

json to_json(const LinguisticVariable& v, std::string_view role) {
  json terms = json::array();
  for (const auto& t : v.terms()) {
    json pts = json::array();
    for (double p : t.mf.points()) pts.push_back(p);
    terms.push_back({{"label", t.label}, {"kind", std::string(to_string(t.mf.kind()))}, {"points", pts}});
  }
  return {{"name", v.name()}, {"role", std::string(role)}, {"universe", {v.lo(), v.hi()}}, {"unit", v.unit()},
          {"terms", terms}};
}

Rule rule_from_json(const json& j) {
  return {clauses_from_json(require(j, "if", "rule"), "if"), clauses_from_json(require(j, "then", "rule"), "then")};
}

json to_json(const Rule& r) { return {{"if", clauses_to_json(r.antecedent)}, {"then", clauses_to_json(r.consequents)}}; }

RuleBase rule_base_from_json(const json& j) {
  RuleBase rb;
  if (j.contains("rules")) {
    for (const auto& r : j.at("rules")) rb.rules.push_back(rule_from_json(r));
  }
  std::set<std::string, std::less<>> concluded;
  for (const auto& r : rb.rules) {
    for (const auto& c : r.consequents) concluded.insert(c.variable);
  }
  for (const auto& vj : require(j, "variables", "rule base")) {
    LinguisticVariable v = variable_from_json(vj);
    std::string role = vj.value("role", std::string{});
    if (role.empty()) role = concluded.contains(v.name()) ? "output" : "input";
    if (role == "input") {
      rb.inputs.push_back(std::move(v));
    } else if (role == "output") {
      rb.outputs.push_back(std::move(v));
    } else {
      throw ConfigError("variable '" + v.name() + "': role must be 'input' or 'output'");
    }
  }
  return rb;
}

json to_json(const RuleBase& rb) {
  json vars = json::array();
  for (const auto& v : rb.inputs) vars.push_back(to_json(v, "input"));
  for (const auto& v : rb.outputs) vars.push_back(to_json(v, "output"));
  json rules = json::array();
  for (const auto& r : rb.rules) rules.push_back(to_json(r));
  return {{"variables", vars}, {"rules", rules}};
}

}  // namespace fuzznav::fuzzy
