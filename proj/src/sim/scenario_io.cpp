#include "fuzznav/scenario_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

namespace fuzznav::sim {

using nlohmann::json;

namespace {

struct Unit {
  const char* name;
  double scale;
};

const std::vector<Unit>& units_of(Dimension d) {
  static const double pi = std::numbers::pi;
  static const std::vector<Unit> length{{"m", 1.0}, {"cm", 0.01}, {"mm", 0.001}, {"km", 1000.0}};
  static const std::vector<Unit> time{{"s", 1.0}, {"ms", 0.001}, {"min", 60.0}};
  static const std::vector<Unit> angle{{"rad", 1.0}, {"deg", pi / 180.0}};
  static const std::vector<Unit> angvel{{"rad/s", 1.0}, {"rpm", 2.0 * pi / 60.0}, {"deg/s", pi / 180.0}};
  static const std::vector<Unit> velocity{{"m/s", 1.0}, {"km/h", 1.0 / 3.6}};
  static const std::vector<Unit> frequency{{"Hz", 1.0}, {"1/s", 1.0}};
  static const std::vector<Unit> voltage{{"V", 1.0}, {"mV", 0.001}};
  static const std::vector<Unit> resistance{{"ohm", 1.0}, {"Ohm", 1.0}, {"\xCE\xA9", 1.0}};
  static const std::vector<Unit> inductance{{"H", 1.0}, {"mH", 0.001}};
  static const std::vector<Unit> mass{{"kg", 1.0}, {"g", 0.001}};
  static const std::vector<Unit> inertia{{"kg*m^2", 1.0}, {"kg m^2", 1.0}};
  static const std::vector<Unit> torque{{"N*m/A", 1.0}, {"Nm/A", 1.0}};
  static const std::vector<Unit> emf{{"V*s/rad", 1.0}, {"V/(rad/s)", 1.0}};
  static const std::vector<Unit> damping{{"N*m*s/rad", 1.0}, {"N*m/(rad/s)", 1.0}};
  static const std::vector<Unit> gain{{"V*s/rad", 1.0}, {"V/(rad/s)", 1.0}};
  switch (d) {
    case Dimension::Length: return length;
    case Dimension::Time: return time;
    case Dimension::Angle: return angle;
    case Dimension::AngularVelocity: return angvel;
    case Dimension::Velocity: return velocity;
    case Dimension::Frequency: return frequency;
    case Dimension::Voltage: return voltage;
    case Dimension::Resistance: return resistance;
    case Dimension::Inductance: return inductance;
    case Dimension::Mass: return mass;
    case Dimension::Inertia: return inertia;
    case Dimension::TorqueConstant: return torque;
    case Dimension::BackEmf: return emf;
    case Dimension::Damping: return damping;
    case Dimension::Gain: return gain;
  }
  return length;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

double apply_unit(double value, const std::string& unit, Dimension dim, const std::string& path) {
  for (const auto& u : units_of(dim)) {
    if (unit == u.name) return value * u.scale;
  }
  std::string known;
  for (const auto& u : units_of(dim)) known += std::string(known.empty() ? "" : ", ") + u.name;
  throw ScenarioError(path + ": unit '" + unit + "' not accepted here (expected one of " + known + ")");
}

// Object reader that remembers which keys were consumed.
class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ScenarioError(where() + ": expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }
  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!obj_.contains(key)) throw ScenarioError(sub(key) + ": missing");
    return obj_.at(key);
  }

  void quantity(const std::string& key, Dimension dim, double& out) {
    if (has(key)) out = parse_quantity(at(key), dim, sub(key));
  }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number()) throw ScenarioError(sub(key) + ": expected a number");
    out = v.get<double>();
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number_integer()) throw ScenarioError(sub(key) + ": expected an integer");
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.is_number_unsigned()) {
        out = v.get<Int>();
      } else if (v.get<long long>() >= 0) {
        out = static_cast<Int>(v.get<long long>());
      } else {
        throw ScenarioError(sub(key) + ": must be non-negative");
      }
    } else {
      out = v.get<Int>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_boolean()) throw ScenarioError(sub(key) + ": expected true or false");
    out = v.get<bool>();
  }

  void string(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_string()) throw ScenarioError(sub(key) + ": expected a string");
    out = v.get<std::string>();
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.contains(key)) throw ScenarioError(sub(key) + ": unknown field");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "scenario" : path_; }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

json q(double value, const char* unit) { return json{{"value", value}, {"unit", unit}}; }

}  // namespace

double parse_quantity(const json& v, Dimension dim, const std::string& path) {
  double value = 0.0;
  std::string unit;
  if (v.is_number()) {
    throw ScenarioError(path + ": bare number " + v.dump() + " has no unit; write e.g. \"" + v.dump() + " " +
                        units_of(dim).front().name + "\"");
  } else if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const std::string t = trim(s);
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first) throw ScenarioError(path + ": cannot read a number from \"" + s + "\"");
    unit = trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr)));
    if (unit.empty()) throw ScenarioError(path + ": \"" + s + "\" has no unit");
  } else if (v.is_object()) {
    if (!v.contains("value") || !v.at("value").is_number() || !v.contains("unit") || !v.at("unit").is_string() ||
        v.size() != 2) {
      throw ScenarioError(path + ": expected {\"value\": number, \"unit\": string}");
    }
    value = v.at("value").get<double>();
    unit = trim(v.at("unit").get<std::string>());
  } else {
    throw ScenarioError(path + ": expected a quantity such as \"1.5 " + std::string(units_of(dim).front().name) +
                        "\"");
  }
  if (!std::isfinite(value)) throw ScenarioError(path + ": value must be finite");
  return apply_unit(value, unit, dim, path);
}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string msg = e.what();
    if (const auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw ScenarioError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg);
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Scenario scenario_from_json(const json& doc, const std::filesystem::path& base_dir) {
  Fields top(doc, "");
  if (!top.has("schema_version")) throw ScenarioError("schema_version: missing");
  int version = 0;
  top.integer("schema_version", version);
  if (version != kSchemaVersion) {
    throw ScenarioError("schema_version: " + std::to_string(version) + " is not supported (expected " +
                        std::to_string(kSchemaVersion) + ")");
  }
  Scenario s;
  top.string("name", s.name);
  top.integer("seed", s.seed);
  top.quantity("duration", Dimension::Time, s.duration);
  top.quantity("dt", Dimension::Time, s.dt);
  top.quantity("control_period", Dimension::Time, s.control_period);
  top.quantity("goal_radius", Dimension::Length, s.goal_radius);

  if (top.has("robot")) {
    Fields r(top.at("robot"), "robot");
    r.quantity("radius", Dimension::Length, s.robot_radius);
    if (r.has("chassis")) {
      Fields c(r.at("chassis"), "robot.chassis");
      c.quantity("wheel_radius", Dimension::Length, s.chassis.wheel_radius);
      c.quantity("axle_length", Dimension::Length, s.chassis.axle_length);
      c.quantity("mass", Dimension::Mass, s.chassis.mass);
      c.finish();
    }
    if (r.has("motor")) {
      Fields m(r.at("motor"), "robot.motor");
      m.quantity("Kt", Dimension::TorqueConstant, s.motor.Kt);
      m.quantity("Ke", Dimension::BackEmf, s.motor.Ke);
      m.quantity("R", Dimension::Resistance, s.motor.R);
      m.quantity("L", Dimension::Inductance, s.motor.L);
      m.quantity("J", Dimension::Inertia, s.motor.J);
      m.quantity("b", Dimension::Damping, s.motor.b);
      m.finish();
    }
    r.finish();
  }

  if (top.has("start")) {
    Fields st(top.at("start"), "start");
    st.quantity("x", Dimension::Length, s.start.x);
    st.quantity("y", Dimension::Length, s.start.y);
    st.quantity("theta", Dimension::Angle, s.start.theta);
    st.finish();
  }
  if (top.has("goal")) {
    Fields g(top.at("goal"), "goal");
    g.quantity("x", Dimension::Length, s.goal.x);
    g.quantity("y", Dimension::Length, s.goal.y);
    g.finish();
  }

  if (top.has("obstacles")) {
    const json& arr = top.at("obstacles");
    if (!arr.is_array()) throw ScenarioError("obstacles: expected an array");
    int next_id = 1;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Fields o(arr[i], "obstacles[" + std::to_string(i) + "]");
      TimedObstacle to;
      to.obstacle.id = next_id;
      o.integer("id", to.obstacle.id);
      o.quantity("x", Dimension::Length, to.obstacle.center.x);
      o.quantity("y", Dimension::Length, to.obstacle.center.y);
      o.quantity("radius", Dimension::Length, to.obstacle.radius);
      o.quantity("vx", Dimension::Velocity, to.obstacle.velocity.x);
      o.quantity("vy", Dimension::Velocity, to.obstacle.velocity.y);
      o.quantity("spawn", Dimension::Time, to.spawn_time);
      o.quantity("despawn", Dimension::Time, to.despawn_time);
      std::string frame = "world";
      o.string("frame", frame);
      if (frame != "world" && frame != "robot") {
        throw ScenarioError(o.sub("frame") + ": expected \"world\" or \"robot\"");
      }
      to.robot_relative = frame == "robot";
      o.finish();
      next_id = std::max(next_id, to.obstacle.id) + 1;
      s.obstacles.push_back(to);
    }
  }

  if (top.has("bounds")) {
    Fields b(top.at("bounds"), "bounds");
    Bounds bounds;
    bounds.min = {parse_quantity(b.at("xmin"), Dimension::Length, "bounds.xmin"),
                  parse_quantity(b.at("ymin"), Dimension::Length, "bounds.ymin")};
    bounds.max = {parse_quantity(b.at("xmax"), Dimension::Length, "bounds.xmax"),
                  parse_quantity(b.at("ymax"), Dimension::Length, "bounds.ymax")};
    b.finish();
    s.bounds = bounds;
  }

  if (top.has("random_world")) {
    Fields w(top.at("random_world"), "random_world");
    RandomWorld rw;
    w.quantity("size", Dimension::Length, rw.size);
    w.integer("static", rw.static_count);
    w.integer("moving", rw.moving_count);
    w.quantity("radius_min", Dimension::Length, rw.radius_min);
    w.quantity("radius_max", Dimension::Length, rw.radius_max);
    w.quantity("speed_max", Dimension::Velocity, rw.speed_max);
    w.quantity("min_start_goal", Dimension::Length, rw.min_start_goal);
    w.quantity("start_margin", Dimension::Length, rw.start_margin);
    w.finish();
    s.random_world = rw;
  }

  if (top.has("sensors")) {
    Fields se(top.at("sensors"), "sensors");
    se.quantity("max_range", Dimension::Length, s.sensors.max_range);
    se.quantity("gps_sigma", Dimension::Length, s.sensors.gps_sigma);
    se.quantity("gps_rate", Dimension::Frequency, s.sensors.gps_rate);
    se.number("fusion_alpha", s.sensors.fusion_alpha);
    se.quantity("compass_sigma", Dimension::Angle, s.sensors.compass_sigma);
    se.finish();
  }

  if (top.has("controller")) {
    Fields c(top.at("controller"), "controller");
    auto& cc = s.controller;
    c.quantity("omega_max", Dimension::AngularVelocity, cc.omega_max);
    c.quantity("kp", Dimension::Gain, cc.bridge.kp);
    c.quantity("v_max", Dimension::Voltage, cc.bridge.v_max);
    c.boolean("use_planner", cc.use_planner);
    c.quantity("clearance", Dimension::Length, cc.planner.clearance);
    c.quantity("moving_horizon", Dimension::Time, cc.planner.moving_horizon);
    c.integer("polygon_sides", cc.planner.polygon_sides);
    c.quantity("nominal_speed", Dimension::Velocity, cc.planner.nominal_speed);
    c.quantity("lookahead", Dimension::Length, cc.lookahead);
    c.quantity("corridor", Dimension::Length, cc.corridor);
    c.quantity("replan_rate", Dimension::Frequency, cc.replan_rate);
    if (c.has("engine")) {
      const json& e = c.at("engine");
      if (e.is_string()) {
        std::filesystem::path p = e.get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        s.engine = parse_json_text(read_text_file(p), p.string());
      } else if (e.is_object()) {
        s.engine = e;
      } else {
        throw ScenarioError("controller.engine: expected a file path or an engine object");
      }
    }
    c.finish();
  }
  top.finish();
  s.controller.fusion_alpha = s.sensors.fusion_alpha;
  s.controller.planner.robot_radius = s.robot_radius;
  s.controller.goal_radius = s.goal_radius;
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  const json doc = parse_json_text(read_text_file(path), path.string());
  return scenario_from_json(doc, path.parent_path());
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["duration"] = q(s.duration, "s");
  j["dt"] = q(s.dt, "s");
  j["control_period"] = q(s.control_period, "s");
  j["goal_radius"] = q(s.goal_radius, "m");
  j["robot"] = {{"radius", q(s.robot_radius, "m")},
                {"chassis",
                 {{"wheel_radius", q(s.chassis.wheel_radius, "m")},
                  {"axle_length", q(s.chassis.axle_length, "m")},
                  {"mass", q(s.chassis.mass, "kg")}}},
                {"motor",
                 {{"Kt", q(s.motor.Kt, "N*m/A")},
                  {"Ke", q(s.motor.Ke, "V*s/rad")},
                  {"R", q(s.motor.R, "ohm")},
                  {"L", q(s.motor.L, "H")},
                  {"J", q(s.motor.J, "kg*m^2")},
                  {"b", q(s.motor.b, "N*m*s/rad")}}}};
  j["start"] = {{"x", q(s.start.x, "m")}, {"y", q(s.start.y, "m")}, {"theta", q(s.start.theta, "rad")}};
  j["goal"] = {{"x", q(s.goal.x, "m")}, {"y", q(s.goal.y, "m")}};
  json obs = json::array();
  for (const auto& to : s.obstacles) {
    json o = {{"id", to.obstacle.id},
              {"x", q(to.obstacle.center.x, "m")},
              {"y", q(to.obstacle.center.y, "m")},
              {"radius", q(to.obstacle.radius, "m")},
              {"vx", q(to.obstacle.velocity.x, "m/s")},
              {"vy", q(to.obstacle.velocity.y, "m/s")},
              {"spawn", q(to.spawn_time, "s")},
              {"frame", to.robot_relative ? "robot" : "world"}};
    if (std::isfinite(to.despawn_time)) o["despawn"] = q(to.despawn_time, "s");
    obs.push_back(o);
  }
  j["obstacles"] = obs;
  if (s.bounds) {
    j["bounds"] = {{"xmin", q(s.bounds->min.x, "m")},
                   {"ymin", q(s.bounds->min.y, "m")},
                   {"xmax", q(s.bounds->max.x, "m")},
                   {"ymax", q(s.bounds->max.y, "m")}};
  }
  if (s.random_world) {
    const auto& w = *s.random_world;
    j["random_world"] = {{"size", q(w.size, "m")},
                         {"static", w.static_count},
                         {"moving", w.moving_count},
                         {"radius_min", q(w.radius_min, "m")},
                         {"radius_max", q(w.radius_max, "m")},
                         {"speed_max", q(w.speed_max, "m/s")},
                         {"min_start_goal", q(w.min_start_goal, "m")},
                         {"start_margin", q(w.start_margin, "m")}};
  }
  j["sensors"] = {{"max_range", q(s.sensors.max_range, "m")},
                  {"gps_sigma", q(s.sensors.gps_sigma, "m")},
                  {"gps_rate", q(s.sensors.gps_rate, "Hz")},
                  {"fusion_alpha", s.sensors.fusion_alpha},
                  {"compass_sigma", q(s.sensors.compass_sigma, "rad")}};
  const auto& c = s.controller;
  j["controller"] = {{"omega_max", q(c.omega_max, "rad/s")},
                     {"kp", q(c.bridge.kp, "V*s/rad")},
                     {"v_max", q(c.bridge.v_max, "V")},
                     {"use_planner", c.use_planner},
                     {"clearance", q(c.planner.clearance, "m")},
                     {"moving_horizon", q(c.planner.moving_horizon, "s")},
                     {"polygon_sides", c.planner.polygon_sides},
                     {"nominal_speed", q(c.planner.nominal_speed, "m/s")},
                     {"lookahead", q(c.lookahead, "m")},
                     {"corridor", q(c.corridor, "m")},
                     {"replan_rate", q(c.replan_rate, "Hz")}};
  if (s.engine) j["controller"]["engine"] = *s.engine;
  return j;
}

}  // namespace fuzznav::sim
