#include "fuzznav/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>
#include <vector>

#include "fuzznav/log_io.hpp"

namespace fuzznav::cli {

using sim::format_double;

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

constexpr double kWidth = 820.0;
constexpr double kHeight = 560.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 190.0;  // legend column
constexpr double kTop = 40.0;
constexpr double kBottom = 56.0;

// Pixel-space numbers; data coordinates use format_double instead.
std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void add(double v, double pad) {
    add(v - pad);
    add(v + pad);
  }
};

double nice_step(double span) {
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double n = raw / mag;
  return (n < 1.5 ? 1.0 : n < 3.0 ? 2.0 : n < 7.0 ? 5.0 : 10.0) * mag;
}

// Widens r to whole tick steps; empty or degenerate ranges get a unit span.
std::pair<double, double> nice_range(Range r) {
  if (!(r.lo <= r.hi)) r = {0.0, 1.0};
  if (r.hi - r.lo < 1e-9) {
    r.lo -= 0.5;
    r.hi += 0.5;
  }
  const double step = nice_step(r.hi - r.lo);
  return {std::floor(r.lo / step) * step, std::ceil(r.hi / step) * step};
}

// Data rectangle mapped onto the plot area, y up.
struct Frame {
  double x0, x1, y0, y1;
  double left = kLeft, top = kTop, width = kWidth - kLeft - kRight, height = kHeight - kTop - kBottom;

  double sx() const { return width / (x1 - x0); }
  double sy() const { return height / (y1 - y0); }
  double to_px(double x) const { return left + (x - x0) * sx(); }
  double to_py(double y) const { return top + (y1 - y) * sy(); }
  std::string matrix() const {
    return "matrix(" + px(sx()) + " 0 0 " + px(-sy()) + " " + px(left - x0 * sx()) + " " + px(top + y1 * sy()) + ")";
  }
};

Frame make_frame(const Range& xr, const Range& yr, bool equal_aspect) {
  const auto [x0, x1] = nice_range(xr);
  const auto [y0, y1] = nice_range(yr);
  Frame f{x0, x1, y0, y1};
  if (equal_aspect) {
    const double scale = std::min(f.width / (x1 - x0), f.height / (y1 - y0));
    const double half_w = 0.5 * f.width / scale;
    const double half_h = 0.5 * f.height / scale;
    const double cx = 0.5 * (x0 + x1);
    const double cy = 0.5 * (y0 + y1);
    f.x0 = cx - half_w;
    f.x1 = cx + half_w;
    f.y0 = cy - half_h;
    f.y1 = cy + half_h;
  }
  return f;
}

std::vector<double> ticks(double lo, double hi) {
  const double step = nice_step(hi - lo);
  std::vector<double> out;
  for (double k = std::ceil(lo / step - 1e-9); k * step <= hi + 1e-9 * step; k += 1.0) {
    const double v = k * step;
    out.push_back(std::abs(v) < 1e-9 * step ? 0.0 : v);
  }
  return out;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

struct LegendEntry {
  std::string label;
  std::string color;
  bool dashed = false;
};

class Document {
 public:
  // Uniform frames take stroke widths in data units, others vector-effect.
  Document(const Frame& f, const std::string& title, bool uniform) : f_(f), uniform_(uniform) {
    out_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(kWidth) + "\" height=\"" + px(kHeight) +
            "\" viewBox=\"0 0 " + px(kWidth) + " " + px(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out_ += "<title>" + xml_escape(title) + "</title>\n";
    out_ += "<defs><clipPath id=\"plot-area\"><rect x=\"" + px(f.left) + "\" y=\"" + px(f.top) + "\" width=\"" +
            px(f.width) + "\" height=\"" + px(f.height) + "\"/></clipPath></defs>\n";
    out_ += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out_ += "<text x=\"" + px(f.left) + "\" y=\"24\" font-size=\"15\">" + xml_escape(title) + "</text>\n";
  }

  void axes(const std::string& xlabel, const std::string& ylabel) {
    out_ += "<g id=\"axes\" stroke=\"#dddddd\" stroke-width=\"1\">\n";
    for (double x : ticks(f_.x0, f_.x1)) {
      const std::string p = px(f_.to_px(x));
      out_ += "<line x1=\"" + p + "\" y1=\"" + px(f_.top) + "\" x2=\"" + p + "\" y2=\"" + px(f_.top + f_.height) +
              "\"/>\n";
      out_ += "<text x=\"" + p + "\" y=\"" + px(f_.top + f_.height + 16) +
              "\" stroke=\"none\" fill=\"#333333\" text-anchor=\"middle\">" + tick_label(x) + "</text>\n";
    }
    for (double y : ticks(f_.y0, f_.y1)) {
      const std::string p = px(f_.to_py(y));
      out_ += "<line x1=\"" + px(f_.left) + "\" y1=\"" + p + "\" x2=\"" + px(f_.left + f_.width) + "\" y2=\"" + p +
              "\"/>\n";
      out_ += "<text x=\"" + px(f_.left - 6) + "\" y=\"" + px(f_.to_py(y) + 4) +
              "\" stroke=\"none\" fill=\"#333333\" text-anchor=\"end\">" + tick_label(y) + "</text>\n";
    }
    out_ += "<rect x=\"" + px(f_.left) + "\" y=\"" + px(f_.top) + "\" width=\"" + px(f_.width) + "\" height=\"" +
            px(f_.height) + "\" fill=\"none\" stroke=\"#888888\"/>\n";
    out_ += "</g>\n";
    out_ += "<text x=\"" + px(f_.left + f_.width / 2) + "\" y=\"" + px(kHeight - 14) + "\" text-anchor=\"middle\">" +
            xml_escape(xlabel) + "</text>\n";
    const std::string ly = px(f_.top + f_.height / 2);
    out_ += "<text x=\"18\" y=\"" + ly + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " + ly + ")\">" +
            xml_escape(ylabel) + "</text>\n";
  }

  void begin_data() {
    out_ += "<g clip-path=\"url(#plot-area)\">\n<g id=\"data\" transform=\"" + f_.matrix() +
            "\" fill=\"none\" stroke-linejoin=\"round\">\n";
  }
  void end_data() { out_ += "</g>\n</g>\n"; }

  std::string stroke(double width, bool dashed, double dash = 6.0, double gap = 4.0) const {
    if (uniform_) {
      const double k = 1.0 / f_.sx();
      std::string a = " stroke-width=\"" + px(width * k) + "\"";
      if (dashed) a += " stroke-dasharray=\"" + px(dash * k) + " " + px(gap * k) + "\"";
      return a;
    }
    std::string a = " stroke-width=\"" + px(width) + "\"";
    if (dashed) a += " stroke-dasharray=\"" + px(dash) + " " + px(gap) + "\"";
    return a + " vector-effect=\"non-scaling-stroke\"";
  }

  void polyline(const std::string& id, const std::string& cls, const std::vector<std::pair<double, double>>& pts,
                const std::string& color, double width, bool dashed, const std::string& extra = {}) {
    if (pts.empty()) return;
    out_ += "<polyline";
    if (!id.empty()) out_ += " id=\"" + xml_escape(id) + "\"";
    out_ += " class=\"" + cls + "\" stroke=\"" + color + "\"" + stroke(width, dashed) + extra + " points=\"";
    bool first = true;
    for (const auto& [x, y] : pts) {
      if (!first) out_ += ' ';
      out_ += format_double(x) + ',' + format_double(y);
      first = false;
    }
    out_ += "\"/>\n";
  }

  void circle(const std::string& cls, double x, double y, double r, const std::string& color, const std::string& fill,
              bool dashed, const std::string& extra = {}) {
    out_ += "<circle class=\"" + cls + "\" cx=\"" + format_double(x) + "\" cy=\"" + format_double(y) + "\" r=\"" +
            format_double(r) + "\" stroke=\"" + color + "\" fill=\"" + fill + "\"" + stroke(1.0, dashed, 4.0, 3.0) +
            extra + "/>\n";
  }

  void vline(const std::string& cls, double x, const std::string& color, const std::string& extra = {}) {
    polyline({}, cls, {{x, f_.y0}, {x, f_.y1}}, color, 1.0, true, extra);
  }

  void rect(double x0, double y0, double x1, double y1, const std::string& color) {
    out_ += "<rect class=\"bounds\" x=\"" + format_double(x0) + "\" y=\"" + format_double(y0) + "\" width=\"" +
            format_double(x1 - x0) + "\" height=\"" + format_double(y1 - y0) + "\" stroke=\"" + color + "\"" + stroke(1.0, false) + "/>\n";
  }

  // Pixel-space marker at a data position, so it keeps its size.
  void marker(const std::string& id, double x, double y, const std::string& color, bool cross) {
    const double cx = f_.to_px(x);
    const double cy = f_.to_py(y);
    if (cross) {
      out_ += "<path id=\"" + id + "\" d=\"M" + px(cx - 6) + " " + px(cy - 6) + "L" + px(cx + 6) + " " + px(cy + 6) +
              "M" + px(cx - 6) + " " + px(cy + 6) + "L" + px(cx + 6) + " " + px(cy - 6) + "\" stroke=\"" + color +
              "\" stroke-width=\"2.5\"/>\n";
    } else {
      out_ += "<circle id=\"" + id + "\" cx=\"" + px(cx) + "\" cy=\"" + px(cy) + "\" r=\"5\" fill=\"" + color +
              "\"/>\n";
    }
  }

  void legend(const std::vector<LegendEntry>& entries) {
    const double x = kWidth - kRight + 16;
    double y = kTop + 12;
    out_ += "<g id=\"legend\">\n";
    for (const auto& e : entries) {
      out_ += "<line x1=\"" + px(x) + "\" y1=\"" + px(y - 4) + "\" x2=\"" + px(x + 24) + "\" y2=\"" + px(y - 4) +
              "\" stroke=\"" + e.color + "\" stroke-width=\"2\"" + (e.dashed ? " stroke-dasharray=\"6 4\"" : "") +
              "/>\n";
      out_ += "<text x=\"" + px(x + 30) + "\" y=\"" + px(y) + "\">" + xml_escape(e.label) + "</text>\n";
      y += 18;
    }
    out_ += "</g>\n";
  }

  void note(double y, const std::string& text) {
    out_ += "<text x=\"" + px(kWidth - kRight + 16) + "\" y=\"" + px(y) + "\" fill=\"#333333\">" + xml_escape(text) +
            "</text>\n";
  }

  std::string finish() {
    out_ += "</svg>\n";
    return std::move(out_);
  }

 private:
  Frame f_;
  bool uniform_;
  std::string out_;
};

std::string title_of(const sim::TrajectoryLog& log, const std::string& what) {
  return log.name + " (seed " + std::to_string(log.seed) + "): " + what;
}

double end_time(const sim::TrajectoryLog& log) { return log.ticks.empty() ? 0.0 : log.ticks.back().t; }

// Centre positions of one obstacle over its lifetime within the run.
std::vector<std::pair<double, double>> obstacle_track(const sim::TrajectoryLog& log, const sim::TimedObstacle& to) {
  std::vector<std::pair<double, double>> pts;
  const std::vector<sim::TimedObstacle> one{to};
  const double t_end = std::min(to.despawn_time, end_time(log));
  const int n = static_cast<int>(std::ceil((t_end - to.spawn_time) / 0.1));
  for (int i = 0; i <= n; ++i) {
    const double t = std::min(to.spawn_time + 0.1 * i, t_end);
    for (const auto& ob : sim::obstacles_at(one, log.bounds, t)) pts.emplace_back(ob.center.x, ob.center.y);
  }
  return pts;
}

constexpr const char* kActual = "#1f77b4";
constexpr const char* kPlan = "#ff7f0e";
constexpr const char* kObstacle = "#d62728";
constexpr const char* kGoal = "#2ca02c";
constexpr const char* kLeftWheel = "#1f77b4";
constexpr const char* kRightWheel = "#d62728";

}  // namespace

std::string path_svg(const sim::TrajectoryLog& log) {
  Range xr, yr;
  for (const auto& k : log.ticks) {
    xr.add(k.truth.x);
    yr.add(k.truth.y);
  }
  for (const auto& p : log.plans) {
    for (const auto& w : p.path.waypoints) {
      xr.add(w.x);
      yr.add(w.y);
    }
  }
  xr.add(log.goal.x, log.goal_radius + 0.5);
  yr.add(log.goal.y, log.goal_radius + 0.5);
  std::vector<std::vector<std::pair<double, double>>> tracks;
  for (const auto& to : log.obstacles) {
    tracks.push_back(to.robot_relative ? std::vector<std::pair<double, double>>{} : obstacle_track(log, to));
    for (const auto& [x, y] : tracks.back()) {
      xr.add(x, to.obstacle.radius);
      yr.add(y, to.obstacle.radius);
    }
  }
  if (log.bounds) {
    xr.add(log.bounds->min.x);
    xr.add(log.bounds->max.x);
    yr.add(log.bounds->min.y);
    yr.add(log.bounds->max.y);
  }
  for (Range* r : {&xr, &yr}) {
    r->lo -= 0.5;
    r->hi += 0.5;
  }
  const Frame f = make_frame(xr, yr, true);
  Document doc(f, title_of(log, "planned and driven path"), true);
  doc.axes("x (m)", "y (m)");
  doc.begin_data();
  if (log.bounds) doc.rect(log.bounds->min.x, log.bounds->min.y, log.bounds->max.x, log.bounds->max.y, "#888888");
  for (std::size_t i = 0; i < log.obstacles.size(); ++i) {
    const auto& to = log.obstacles[i];
    const auto& track = tracks[i];
    if (track.empty()) continue;
    const std::string attrs = " data-id=\"" + std::to_string(to.obstacle.id) + "\" data-spawn=\"" +
                              format_double(to.spawn_time) + "\"";
    doc.circle("obstacle", track.front().first, track.front().second, to.obstacle.radius, kObstacle, "#f4b6b6", false,
               attrs);
    if (track.size() > 1 && (to.obstacle.velocity.x != 0.0 || to.obstacle.velocity.y != 0.0)) {
      doc.polyline("track-" + std::to_string(to.obstacle.id), "obstacle-track", track, kObstacle, 1.0, true);
      doc.circle("obstacle-final", track.back().first, track.back().second, to.obstacle.radius, kObstacle, "none",
                 true, attrs);
    }
  }
  doc.circle("goal", log.goal.x, log.goal.y, log.goal_radius, kGoal, "#c7e9c0", false);
  for (std::size_t i = 0; i < log.plans.size(); ++i) {
    const auto& p = log.plans[i];
    std::vector<std::pair<double, double>> pts;
    for (const auto& w : p.path.waypoints) pts.emplace_back(w.x, w.y);
    doc.polyline("plan-" + std::to_string(i), "plan", pts, kPlan, 1.5, true,
                 " data-time=\"" + format_double(p.time) + "\" data-reason=\"" + xml_escape(p.reason) + "\"");
  }
  std::vector<std::pair<double, double>> driven;
  driven.reserve(log.ticks.size());
  for (const auto& k : log.ticks) driven.emplace_back(k.truth.x, k.truth.y);
  doc.polyline("actual", "series", driven, kActual, 2.0, false);
  doc.end_data();
  if (!log.ticks.empty()) {
    doc.marker("start", log.ticks.front().truth.x, log.ticks.front().truth.y, kActual, false);
    if (log.terminal.status == sim::Status::Collision) {
      doc.marker("collision", log.ticks.back().truth.x, log.ticks.back().truth.y, kObstacle, true);
    }
  }
  doc.legend({{"driven path", kActual, false},
              {"planned path", kPlan, true},
              {"obstacle", kObstacle, false},
              {"obstacle track", kObstacle, true},
              {"goal", kGoal, false}});
  doc.note(kTop + 120, std::string("status: ") + sim::to_string(log.terminal.status));
  doc.note(kTop + 138, "end: " + tick_label(log.terminal.time) + " s");
  doc.note(kTop + 156, "plans: " + std::to_string(log.plans.size()));
  return doc.finish();
}

std::string speeds_svg(const sim::TrajectoryLog& log) {
  Range xr, yr;
  xr.add(0.0);
  xr.add(end_time(log));
  yr.add(0.0);
  std::vector<std::pair<double, double>> lc, rc, lm, rm;
  for (const auto& k : log.ticks) {
    lc.emplace_back(k.t, k.command.omega_left);
    rc.emplace_back(k.t, k.command.omega_right);
    lm.emplace_back(k.t, k.left.omega);
    rm.emplace_back(k.t, k.right.omega);
    for (double v : {k.command.omega_left, k.command.omega_right, k.left.omega, k.right.omega}) yr.add(v);
  }
  const Frame f = make_frame(xr, yr, false);
  Document doc(f, title_of(log, "wheel speeds"), false);
  doc.axes("time (s)", "wheel speed (rad/s)");
  doc.begin_data();
  for (const auto& to : log.obstacles) {
    if (to.spawn_time > 0.0 && to.spawn_time <= end_time(log)) {
      doc.vline("spawn", to.spawn_time, "#888888", " data-id=\"" + std::to_string(to.obstacle.id) + "\"");
    }
  }
  doc.polyline("left-measured", "series", lm, kLeftWheel, 1.0, true);
  doc.polyline("right-measured", "series", rm, kRightWheel, 1.0, true);
  doc.polyline("left-command", "series", lc, kLeftWheel, 2.0, false);
  doc.polyline("right-command", "series", rc, kRightWheel, 2.0, false);
  doc.end_data();
  doc.legend({{"left command", kLeftWheel, false},
              {"right command", kRightWheel, false},
              {"left measured", kLeftWheel, true},
              {"right measured", kRightWheel, true},
              {"obstacle spawn", "#888888", true}});
  return doc.finish();
}

std::string tracking_error_svg(const sim::TrajectoryLog& log) {
  const std::vector<double> err = sim::active_tracking_error(log);
  Range xr, yr;
  xr.add(0.0);
  xr.add(end_time(log));
  yr.add(0.0);
  std::vector<std::pair<double, double>> pts;
  double sum = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    pts.emplace_back(log.ticks[i].t, err[i]);
    yr.add(err[i]);
    sum += err[i];
    worst = std::max(worst, err[i]);
  }
  const Frame f = make_frame(xr, yr, false);
  Document doc(f, title_of(log, "tracking error"), false);
  doc.axes("time (s)", "distance to active plan (m)");
  doc.begin_data();
  for (const auto& p : log.plans) {
    if (p.time > 0.0) {
      doc.vline("replan", p.time, kPlan, " data-time=\"" + format_double(p.time) + "\" data-reason=\"" +
                                            xml_escape(p.reason) + "\"");
    }
  }
  doc.polyline("tracking-error", "series", pts, kActual, 1.5, false);
  doc.end_data();
  doc.legend({{"tracking error", kActual, false}, {"replan", kPlan, true}});
  if (!err.empty()) {
    doc.note(kTop + 60, "mean: " + tick_label(sum / static_cast<double>(err.size())) + " m");
    doc.note(kTop + 78, "max: " + tick_label(worst) + " m");
  }
  return doc.finish();
}

}  // namespace fuzznav::cli
