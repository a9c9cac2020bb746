#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "fuzznav/atomic_file.hpp"
#include "fuzznav/cli.hpp"
#include "fuzznav/log_io.hpp"
#include "fuzznav/rule_layers.hpp"
#include "fuzznav/scenario_io.hpp"

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using nlohmann::json;

namespace {

const fs::path kScenarios = fs::path(FUZZNAV_SOURCE_DIR) / "scenarios";

// Fresh directory removed when the test case ends.
struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> n{0};
    path = fs::temp_directory_path() / ("fuzznav_cli_" + std::to_string(::getpid()) + "_" + std::to_string(n++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path operator/(const std::string& name) const { return path / name; }
};

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Result invoke(const TempDir& dir, const std::vector<std::string>& args, const std::string& env = {}) {
  std::string cmd = env.empty() ? "" : env + " ";
  cmd += quote(FUZZNAV_BINARY);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " >" + quote((dir / "stdout.txt").string()) + " 2>" + quote((dir / "stderr.txt").string());
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "stdout.txt");
  r.err = slurp(dir / "stderr.txt");
  return r;
}

std::string scenario(const char* name) { return (kScenarios / name).string(); }

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  REQUIRE(it != header.end());
  return static_cast<std::size_t>(it - header.begin());
}

// Every element below `node` (depth first) with the given tag.
void collect(const pt::ptree& node, const std::string& tag, std::vector<const pt::ptree*>& out) {
  for (const auto& [name, child] : node) {
    if (name == tag) out.push_back(&child);
    if (name != "<xmlattr>") collect(child, tag, out);
  }
}

std::optional<std::string> attr(const pt::ptree& el, const std::string& name) {
  if (auto v = el.get_optional<std::string>("<xmlattr>." + name)) return *v;
  return std::nullopt;
}

const pt::ptree& element_by_id(const pt::ptree& doc, const std::string& tag, const std::string& id) {
  std::vector<const pt::ptree*> all;
  collect(doc, tag, all);
  for (const auto* el : all) {
    if (attr(*el, "id") == id) return *el;
  }
  FAIL("no <" << tag << " id=" << id << ">");
  throw std::logic_error("unreachable");
}

std::vector<std::pair<std::string, std::string>> points_of(const pt::ptree& polyline) {
  std::vector<std::pair<std::string, std::string>> pts;
  std::istringstream in(*attr(polyline, "points"));
  for (std::string p; in >> p;) {
    const auto comma = p.find(',');
    pts.emplace_back(p.substr(0, comma), p.substr(comma + 1));
  }
  return pts;
}

pt::ptree read_svg(const fs::path& p) {
  pt::ptree doc;
  pt::read_xml(p.string(), doc);  // throws on malformed XML
  return doc;
}

}  // namespace

TEST_CASE("help documents every flag") {
  TempDir dir;
  const Result top = invoke(dir, {"--help"});
  CHECK(top.code == 0);
  for (const char* sub : {"run", "batch", "validate", "plot", "rules"}) CHECK(top.out.find(sub) != std::string::npos);

  const std::vector<std::pair<std::string, std::vector<std::string>>> flags = {
      {"run", {"--scenario", "--out", "--seed", "--dt", "--svg", "--quiet"}},
      {"batch", {"--scenario", "--out", "--seed", "--dt", "--runs", "--quiet"}},
      {"validate", {"--scenario", "--seed", "--dt", "--quiet"}},
      {"plot", {"--scenario", "--out", "--seed", "--dt", "--quiet"}},
      {"rules", {"--engine", "--scenario", "--out", "--grid", "--validation-grid", "--quiet"}}};
  for (const auto& [sub, names] : flags) {
    const Result r = invoke(dir, {sub, "--help"});
    CHECK(r.code == 0);
    for (const auto& f : names) CHECK_MESSAGE(r.out.find(f) != std::string::npos, sub << " " << f);
  }
}

TEST_CASE("usage errors exit 1") {
  TempDir dir;
  Result r = invoke(dir, {"run", "--scenario", scenario("baseline.json"), "--out", (dir / "o").string(), "--fast"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--fast") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "o"));

  CHECK(invoke(dir, {}).code == 1);
  CHECK(invoke(dir, {"fly"}).code == 1);
  CHECK(invoke(dir, {"run"}).code == 1);
  CHECK(invoke(dir, {"run", "--scenario", (dir / "missing.json").string()}).code == 1);
  CHECK(invoke(dir, {"batch", "--scenario", scenario("baseline.json"), "--runs", "0"}).code == 1);
  CHECK(invoke(dir, {"rules", "--grid", "1"}).code == 1);
  CHECK(invoke(dir, {"rules", "--engine", "a.json", "--scenario", "b.json"}).code == 1);
}

TEST_CASE("malformed JSON reports line and column") {
  TempDir dir;
  write_text(dir / "bad.json", "{\n  \"schema_version\": 1,\n  \"dt\": \"0.01 s\",,\n}\n");
  const Result r = invoke(dir, {"run", "--scenario", (dir / "bad.json").string(), "--out", (dir / "o").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("bad.json:3:18: ") != std::string::npos);
}

TEST_CASE("invalid scenarios exit 1, unreachable goals exit 2") {
  TempDir dir;
  json doc = json::parse(slurp(scenario("baseline.json")));
  doc["duration"] = "-1 s";
  write_text(dir / "negative.json", doc.dump());
  CHECK(invoke(dir, {"validate", "--scenario", (dir / "negative.json").string()}).code == 1);

  doc = json::parse(slurp(scenario("baseline.json")));
  doc["obstacles"] = json::array({{{"id", 1}, {"x", "12 m"}, {"y", "2.2 m"}, {"radius", "0.5 m"}}});
  write_text(dir / "blocked.json", doc.dump());
  for (const char* sub : {"run", "validate", "plot", "batch"}) {
    std::vector<std::string> args{sub, "--scenario", (dir / "blocked.json").string()};
    if (std::string(sub) != "validate") args.insert(args.end(), {"--out", (dir / "o").string()});
    const Result r = invoke(dir, args);
    CHECK_MESSAGE(r.code == 2, sub);
    CHECK(r.err.find("unreachable goal") != std::string::npos);
  }
}

TEST_CASE("run writes the artifacts") {
  TempDir dir;
  const fs::path out = dir / "baseline";
  const Result r = invoke(dir, {"run", "--scenario", scenario("baseline.json"), "--out", out.string(), "--svg"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("GoalReached") != std::string::npos);
  for (const char* f : {"trajectory.csv", "metrics.json", "plans.json", "path.svg", "speeds.svg", "tracking_error.svg"}) {
    CHECK_MESSAGE(fs::file_size(out / f) > 0, f);
  }
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(out)) {
    ++files;
    CHECK(e.path().string().find(".tmp") == std::string::npos);
  }
  CHECK(files == 6);

  const json m = json::parse(slurp(out / "metrics.json"));
  CHECK(m["status"] == "GoalReached");
  CHECK(m["seed"] == 7);
  CHECK(json::parse(slurp(out / "plans.json")).is_array());

  SUBCASE("without --svg no plots") {
    const fs::path bare = dir / "bare";
    REQUIRE(invoke(dir, {"run", "--scenario", scenario("baseline.json"), "--out", bare.string()}).code == 0);
    CHECK(fs::exists(bare / "trajectory.csv"));
    CHECK_FALSE(fs::exists(bare / "path.svg"));
  }
  SUBCASE("plot writes only the plots") {
    const fs::path plots = dir / "plots";
    REQUIRE(invoke(dir, {"plot", "--scenario", scenario("baseline.json"), "--out", plots.string()}).code == 0);
    CHECK(fs::exists(plots / "speeds.svg"));
    CHECK_FALSE(fs::exists(plots / "trajectory.csv"));
  }
}

TEST_CASE("a timeout is a status, not a failure") {
  TempDir dir;
  const Result r = invoke(dir, {"run", "--scenario", scenario("ring.json"), "--out", (dir / "o").string()});
  CHECK(r.code == 0);
  CHECK(json::parse(slurp(dir / "o" / "metrics.json"))["status"] == "Timeout");
}

TEST_CASE("SVG coordinates read back as the CSV values") {
  TempDir dir;
  const fs::path out = dir / "o";
  REQUIRE(invoke(dir, {"run", "--scenario", scenario("replan_demo.json"), "--out", out.string(), "--svg"}).code == 0);
  const auto rows = csv_rows(slurp(out / "trajectory.csv"));
  REQUIRE(rows.size() > 100);
  const auto& header = rows.front();

  const pt::ptree path = read_svg(out / "path.svg");
  const auto driven = points_of(element_by_id(path, "polyline", "actual"));
  REQUIRE(driven.size() == rows.size() - 1);
  const std::size_t cx = column(header, "x");
  const std::size_t cy = column(header, "y");
  for (std::size_t i = 0; i < driven.size(); ++i) {
    REQUIRE(driven[i].first == rows[i + 1][cx]);
    REQUIRE(driven[i].second == rows[i + 1][cy]);
  }
  const json plans = json::parse(slurp(out / "plans.json"));
  REQUIRE(plans.size() == 3);
  for (std::size_t k = 0; k < plans.size(); ++k) {
    const auto& pl = element_by_id(path, "polyline", "plan-" + std::to_string(k));
    const auto pts = points_of(pl);
    REQUIRE(pts.size() == plans[k]["waypoints"].size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      CHECK(std::stod(pts[i].first) == plans[k]["waypoints"][i][0].get<double>());
      CHECK(std::stod(pts[i].second) == plans[k]["waypoints"][i][1].get<double>());
    }
    CHECK(std::stod(*attr(pl, "data-time")) == plans[k]["time"].get<double>());
  }
  std::vector<const pt::ptree*> circles;
  collect(path, "circle", circles);
  int goals = 0;
  for (const auto* c : circles) {
    if (attr(*c, "class") != "goal") continue;
    ++goals;
    CHECK(*attr(*c, "cx") == "20");
    CHECK(*attr(*c, "cy") == "0");
  }
  CHECK(goals == 1);

  const pt::ptree speeds = read_svg(out / "speeds.svg");
  for (const auto& [id, col] : std::vector<std::pair<std::string, std::string>>{
           {"left-command", "wl_cmd"}, {"right-command", "wr_cmd"}, {"left-measured", "wl"}, {"right-measured", "wr"}}) {
    const auto pts = points_of(element_by_id(speeds, "polyline", id));
    REQUIRE(pts.size() == rows.size() - 1);
    const std::size_t ct = column(header, "t");
    const std::size_t cv = column(header, col);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      REQUIRE(pts[i].first == rows[i + 1][ct]);
      REQUIRE(pts[i].second == rows[i + 1][cv]);
    }
  }

  const pt::ptree tracking = read_svg(out / "tracking_error.svg");
  const auto err = points_of(element_by_id(tracking, "polyline", "tracking-error"));
  CHECK(err.size() == rows.size() - 1);
  std::vector<const pt::ptree*> lines;
  collect(tracking, "polyline", lines);
  const auto replans = std::count_if(lines.begin(), lines.end(), [](const pt::ptree* l) {
    return attr(*l, "class") == "replan";
  });
  CHECK(replans == 2);
}

TEST_CASE("the data matrix maps world units onto the plot area") {
  TempDir dir;
  REQUIRE(invoke(dir, {"plot", "--scenario", scenario("baseline.json"), "--out", (dir / "o").string()}).code == 0);
  const pt::ptree svg = read_svg(dir / "o" / "path.svg");
  const auto& data = element_by_id(svg, "g", "data");
  std::string m = *attr(data, "transform");
  REQUIRE(m.rfind("matrix(", 0) == 0);
  std::replace(m.begin(), m.end(), '(', ' ');
  std::replace(m.begin(), m.end(), ')', ' ');
  std::istringstream in(m.substr(6));
  double a, b, c, d, e, f;
  in >> a >> b >> c >> d >> e >> f;
  CHECK(b == 0.0);
  CHECK(c == 0.0);
  CHECK(a > 0.0);
  CHECK(d == doctest::Approx(-a));  // equal aspect, y up
  const auto& clip = element_by_id(svg, "clipPath", "plot-area");
  const double x0 = clip.get<double>("rect.<xmlattr>.x");
  const double y0 = clip.get<double>("rect.<xmlattr>.y");
  const double w = clip.get<double>("rect.<xmlattr>.width");
  const double h = clip.get<double>("rect.<xmlattr>.height");
  // Start (0, 0) and goal (12, 2) both land inside the plot area.
  for (auto [x, y] : {std::pair{0.0, 0.0}, std::pair{12.0, 2.0}}) {
    const double px = a * x + e;
    const double py = d * y + f;
    CHECK(px > x0);
    CHECK(px < x0 + w);
    CHECK(py > y0);
    CHECK(py < y0 + h);
  }
}

TEST_CASE("titles are escaped") {
  TempDir dir;
  json doc = json::parse(slurp(scenario("baseline.json")));
  doc["name"] = "a<b & \"c\"";
  doc["duration"] = "1 s";
  write_text(dir / "odd.json", doc.dump());
  REQUIRE(invoke(dir, {"plot", "--scenario", (dir / "odd.json").string(), "--out", (dir / "o").string()}).code == 0);
  for (const char* f : {"path.svg", "speeds.svg", "tracking_error.svg"}) {
    const pt::ptree svg = read_svg(dir / "o" / f);
    CHECK(svg.get<std::string>("svg.title").rfind("a<b & \"c\"", 0) == 0);
  }
}

TEST_CASE("overrides and quiet") {
  TempDir dir;
  const Result r = invoke(dir, {"run", "--scenario", scenario("baseline.json"), "--out", (dir / "o").string(), "--dt",
                                 "0.005", "--seed", "99", "--quiet"});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  const json m = json::parse(slurp(dir / "o" / "metrics.json"));
  CHECK(m["dt"].get<double>() == 0.005);
  CHECK(m["seed"] == 99);
  CHECK(invoke(dir, {"run", "--scenario", scenario("baseline.json"), "--dt", "0"}).code == 1);
}

TEST_CASE("rules on the shipped table") {
  TempDir dir;
  const Result r = invoke(dir, {"rules", "--out", dir.path.string(), "--grid", "7"});
  CHECK(r.code == 0);
  CHECK(r.out.find("135 rules") != std::string::npos);
  CHECK(r.out.find("complete, 0 conflicts") != std::string::npos);
  const auto rows = csv_rows(slurp(dir / "response_surface.csv"));
  CHECK(rows.size() == 1 + 7 * 7);
  CHECK(rows.front() == std::vector<std::string>{"direction_error", "obstacle_front", "left_speed", "right_speed"});

  const Result from_scenario = invoke(dir, {"rules", "--scenario", scenario("baseline.json"), "--out", dir.path.string()});
  CHECK(from_scenario.code == 0);
  CHECK(csv_rows(slurp(dir / "response_surface.csv")).size() == 1 + 21 * 21);
}

TEST_CASE("rules with a layer deleted lists the gaps") {
  TempDir dir;
  const json doc = fuzznav::nav::without_layer(fuzznav::nav::default_engine_document(), "cruise");
  write_text(dir / "engine.json", doc.dump(2));
  const Result r = invoke(dir, {"rules", "--engine", (dir / "engine.json").string(), "--out", dir.path.string()});
  CHECK(r.code == 1);
  CHECK(r.out.find("complete, 0 conflicts") == std::string::npos);
  CHECK(r.out.find("  gap: target_distance=") != std::string::npos);
  CHECK(fs::exists(dir / "response_surface.csv"));
}

TEST_CASE("response surface mirrors with the direction error") {
  const auto engine = fuzznav::nav::build_navigation_engine();
  const auto rows = csv_rows(fuzznav::cli::response_surface_csv(engine, 9));
  REQUIRE(rows.size() == 1 + 81);
  // Row (i, j) and row (8 - i, j) are mirror images: wheel speeds swap.
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      const auto& a = rows[1 + static_cast<std::size_t>(i * 9 + j)];
      const auto& b = rows[1 + static_cast<std::size_t>((8 - i) * 9 + j)];
      CHECK(std::stod(a[0]) == doctest::Approx(-std::stod(b[0])));
      CHECK(std::stod(a[2]) == doctest::Approx(std::stod(b[3])).epsilon(1e-9));
      CHECK(std::stod(a[3]) == doctest::Approx(std::stod(b[2])).epsilon(1e-9));
    }
  }
}

TEST_CASE("batch of one matches the single run") {
  TempDir dir;
  REQUIRE(invoke(dir, {"batch", "--scenario", scenario("random_world.json"), "--runs", "1", "--seed", "5", "--out",
                        (dir / "b").string()})
              .code == 0);
  REQUIRE(invoke(dir, {"run", "--scenario", scenario("random_world.json"), "--seed", "5", "--out",
                        (dir / "r").string()})
              .code == 0);
  const json m = json::parse(slurp(dir / "r" / "metrics.json"));
  const auto rows = csv_rows(slurp(dir / "b" / "batch_runs.csv"));
  REQUIRE(rows.size() == 2);
  const auto& h = rows[0];
  const auto& row = rows[1];
  CHECK(row[column(h, "seed")] == "5");
  CHECK(row[column(h, "status")] == m["status"].get<std::string>());
  for (const char* key : {"path_length", "final_distance", "min_clearance", "mean_tracking_error",
                          "max_tracking_error"}) {
    const std::string jkey = std::string(key) == "min_clearance" ? "min_obstacle_clearance" : key;
    CHECK_MESSAGE(std::stod(row[column(h, key)]) == m[jkey].get<double>(), key);
  }
  CHECK(std::stoi(row[column(h, "replans")]) == m["replans"].get<int>());
  const json summary = json::parse(slurp(dir / "b" / "batch_summary.json"));
  CHECK(summary["runs"] == 1);
  if (m["status"] == "GoalReached") {
    CHECK(summary["mean_time_to_goal"].get<double>() == m["time_to_goal"].get<double>());
  }
}

TEST_CASE("same seed, same bytes") {
  TempDir dir;
  for (const char* run : {"a", "b"}) {
    REQUIRE(invoke(dir, {"run", "--scenario", scenario("random_world.json"), "--seed", "11", "--out",
                          (dir / run).string(), "--svg"})
                .code == 0);
  }
  for (const char* f : {"trajectory.csv", "metrics.json", "plans.json", "path.svg"}) {
    CHECK_MESSAGE(slurp(dir / "a" / f) == slurp(dir / "b" / f), f);
  }
  REQUIRE(invoke(dir, {"batch", "--scenario", scenario("random_world.json"), "--runs", "6", "--seed", "40", "--out",
                        (dir / "serial").string()},
                  "FUZZNAV_THREADS=1")
              .code == 0);
  REQUIRE(invoke(dir, {"batch", "--scenario", scenario("random_world.json"), "--runs", "6", "--seed", "40", "--out",
                        (dir / "parallel").string()},
                  "FUZZNAV_THREADS=6")
              .code == 0);
  for (const char* f : {"batch_runs.csv", "batch_summary.csv", "batch_summary.json"}) {
    CHECK_MESSAGE(slurp(dir / "serial" / f) == slurp(dir / "parallel" / f), f);
  }
}

TEST_CASE("atomic writes replace whole files") {
  TempDir dir;
  const fs::path p = dir / "a.txt";
  fuzznav::cli::write_file_atomic(p, "first");
  fuzznav::cli::write_file_atomic(p, "second");
  CHECK(slurp(p) == "second");
  CHECK(std::distance(fs::directory_iterator(dir.path), fs::directory_iterator()) == 1);
  CHECK_THROWS(fuzznav::cli::write_file_atomic(dir / "no" / "such" / "dir.txt", "x"));
  CHECK(std::distance(fs::directory_iterator(dir.path), fs::directory_iterator()) == 1);
}
