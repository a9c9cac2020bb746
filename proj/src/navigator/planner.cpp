#include "fuzznav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fuzznav::nav {

double PlannedPath::length() const {
  double s = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) s += distance(waypoints[i - 1], waypoints[i]);
  return s;
}

double inflated_radius(const sensors::Obstacle& ob, const PlannerConfig& cfg) {
  return ob.radius + cfg.robot_radius + cfg.clearance;
}

namespace {

Vec2 swept_end(const sensors::Obstacle& ob, const PlannerConfig& cfg) {
  return ob.center + ob.velocity * cfg.moving_horizon;
}

Vec2 closest_on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return a;
  const double u = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return a + ab * u;
}

bool segment_clear(const Vec2& a, const Vec2& b, const std::vector<Disc>& discs) {
  for (const auto& d : discs) {
    if (point_segment_distance(d.center, a, b) < d.radius) return false;
  }
  return true;
}

PlannedPath stamp(std::vector<Vec2> pts, const PlannerConfig& cfg, double t0) {
  PlannedPath p;
  p.waypoints = std::move(pts);
  double s = 0.0;
  for (std::size_t i = 0; i < p.waypoints.size(); ++i) {
    if (i > 0) s += distance(p.waypoints[i - 1], p.waypoints[i]);
    p.timestamps.push_back(t0 + s / cfg.nominal_speed);
  }
  return p;
}

bool touching(const sensors::Obstacle& ob, const PlannerConfig& cfg, const Vec2& p) {
  return distance(p, ob.center) <= ob.radius + cfg.robot_radius;
}

std::vector<Vec2> shortest_path(const Vec2& start, const Vec2& goal, const std::vector<sensors::Obstacle>& world,
                                const PlannerConfig& cfg) {
  std::vector<Disc> discs;
  for (const auto& ob : world) {
    if (touching(ob, cfg, start)) continue;
    for (Disc d : keep_out_discs(ob, cfg)) {
      const double gap = distance(start, d.center);
      if (gap < d.radius) d.radius = gap - 1e-6;
      discs.push_back(d);
    }
  }
  if (start == goal) return {start};
  if (segment_clear(start, goal, discs)) return {start, goal};

  // Node 0 = start, node 1 = goal, then polygon corners outside every disc.
  std::vector<Vec2> nodes{start, goal};
  const int n = std::max(cfg.polygon_sides, 3);
  const double corner = (1.0 + 1e-6) / std::cos(std::numbers::pi / n);
  for (const auto& d : discs) {
    for (int k = 0; k < n; ++k) {
      const double a = 2.0 * std::numbers::pi * k / n;
      const Vec2 p{d.center.x + d.radius * corner * std::cos(a), d.center.y + d.radius * corner * std::sin(a)};
      bool free = true;
      for (const auto& other : discs) {
        if (distance(p, other.center) < other.radius) {
          free = false;
          break;
        }
      }
      if (free) nodes.push_back(p);
    }
  }

  // Dijkstra on the implicit visibility graph.
  const std::size_t m = nodes.size();
  std::vector<double> dist(m, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> prev(m, m);
  std::vector<bool> done(m, false);
  dist[0] = 0.0;
  for (;;) {
    std::size_t u = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (!done[i] && std::isfinite(dist[i]) && (u == m || dist[i] < dist[u])) u = i;
    }
    if (u == m || u == 1) break;
    done[u] = true;
    for (std::size_t v = 0; v < m; ++v) {
      if (done[v]) continue;
      const double w = distance(nodes[u], nodes[v]);
      if (dist[u] + w >= dist[v]) continue;
      if (!segment_clear(nodes[u], nodes[v], discs)) continue;
      dist[v] = dist[u] + w;
      prev[v] = u;
    }
  }
  if (!std::isfinite(dist[1])) throw NoPathFound("obstacles separate start and goal");
  std::vector<Vec2> pts;
  for (std::size_t v = 1; v != m; v = prev[v]) pts.push_back(nodes[v]);
  std::reverse(pts.begin(), pts.end());
  return pts;
}

}  // namespace

double keep_out_distance(const sensors::Obstacle& ob, const PlannerConfig& cfg, const Vec2& p) {
  const Vec2 end = swept_end(ob, cfg);
  return distance(p, closest_on_segment(p, ob.center, end)) - inflated_radius(ob, cfg);
}

std::vector<Disc> keep_out_discs(const sensors::Obstacle& ob, const PlannerConfig& cfg) {
  const double r = inflated_radius(ob, cfg);
  const Vec2 end = swept_end(ob, cfg);
  const double len = distance(ob.center, end);
  // Spacing r/2 keeps the scallops between neighbours under 4% of r.
  const int gaps = static_cast<int>(std::ceil(len / (0.5 * r)));
  std::vector<Disc> out;
  for (int k = 0; k <= gaps; ++k) {
    const double u = gaps == 0 ? 0.0 : static_cast<double>(k) / gaps;
    out.push_back({ob.center + (end - ob.center) * u, r});
  }
  return out;
}

PlannedPath plan_path(const Vec2& start, const Vec2& goal, const std::vector<sensors::Obstacle>& world,
                      const PlannerConfig& cfg, double start_time) {
  for (const auto& ob : world) {
    if (keep_out_distance(ob, cfg, goal) < 0.0) {
      throw UnreachableGoal("goal lies within the keep-out region of obstacle " + std::to_string(ob.id));
    }
  }
  // Deepest moving region around the start, if any.
  const sensors::Obstacle* threat = nullptr;
  double depth = 0.0;
  for (const auto& ob : world) {
    if (ob.velocity == Vec2{} || touching(ob, cfg, start)) continue;
    const double d = keep_out_distance(ob, cfg, start);
    if (d < depth) {
      depth = d;
      threat = &ob;
    }
  }
  if (!threat) return stamp(shortest_path(start, goal, world, cfg), cfg, start_time);

  const Vec2 q = closest_on_segment(start, threat->center, swept_end(*threat, cfg));
  Vec2 away = start - q;
  if (norm(away) < 1e-9) away = Vec2{-threat->velocity.y, threat->velocity.x};
  const Vec2 exit = q + away * ((inflated_radius(*threat, cfg) + 0.05) / norm(away));
  std::vector<Vec2> pts{start};
  for (const auto& p : shortest_path(exit, goal, world, cfg)) pts.push_back(p);
  return stamp(std::move(pts), cfg, start_time);
}

double distance_to_path(const std::vector<Vec2>& path, const Vec2& p) {
  if (path.empty()) return std::numeric_limits<double>::infinity();
  if (path.size() == 1) return distance(path.front(), p);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < path.size(); ++i) best = std::min(best, point_segment_distance(p, path[i - 1], path[i]));
  return best;
}

std::vector<double> tracking_error(const PlannedPath& planned, const std::vector<Vec2>& actual) {
  std::vector<double> out;
  out.reserve(actual.size());
  for (const auto& p : actual) out.push_back(distance_to_path(planned.waypoints, p));
  return out;
}

PathFollower::PathFollower(PlannedPath path, double lookahead) : path_(std::move(path)), lookahead_(lookahead) {
  cumulative_.push_back(0.0);
  for (std::size_t i = 1; i < path_.waypoints.size(); ++i) {
    cumulative_.push_back(cumulative_.back() + distance(path_.waypoints[i - 1], path_.waypoints[i]));
  }
}

PathFollower::Target PathFollower::advance(const Vec2& p) {
  const auto& w = path_.waypoints;
  if (w.size() < 2) {
    const Vec2 end = w.empty() ? p : w.front();
    return {end, distance(p, end), end};
  }
  // Search forward from the current segment, within a window ahead of the
  // last projection so a path folding back on itself cannot be skipped.
  const double window = progress_ + 2.0 * lookahead_ + 2.0;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_seg = segment_;
  double best_s = progress_;
  for (std::size_t i = segment_; i + 1 < w.size() && cumulative_[i] <= window; ++i) {
    const Vec2 ab = w[i + 1] - w[i];
    const double len = cumulative_[i + 1] - cumulative_[i];
    const double u_min = (i == segment_ && len > 0.0) ? std::clamp((progress_ - cumulative_[i]) / len, 0.0, 1.0) : 0.0;
    double u = len > 0.0 ? dot(p - w[i], ab) / (len * len) : 0.0;
    u = std::clamp(u, u_min, 1.0);
    const double s = cumulative_[i] + u * len;
    const double d = distance(p, w[i] + ab * u);
    if (d < best) {
      best = d;
      best_seg = i;
      best_s = s;
    }
  }
  segment_ = best_seg;
  progress_ = best_s;

  auto point_at = [&](double s) {
    if (s >= cumulative_.back()) return w.back();
    std::size_t i = segment_;
    while (i + 2 < w.size() && cumulative_[i + 1] < s) ++i;
    const double len = cumulative_[i + 1] - cumulative_[i];
    const double u = len > 0.0 ? (s - cumulative_[i]) / len : 0.0;
    return w[i] + (w[i + 1] - w[i]) * u;
  };
  const Vec2 proj = point_at(progress_);
  const double steer_s = std::min(progress_ + lookahead_, cumulative_.back());
  const Vec2 steer = point_at(steer_s);
  return {steer, distance(p, steer) + (cumulative_.back() - steer_s), proj};
}

std::vector<Vec2> PathFollower::remaining_path() const {
  const auto& w = path_.waypoints;
  if (w.size() < 2) return w;
  std::vector<Vec2> out;
  const double len = cumulative_[segment_ + 1] - cumulative_[segment_];
  const double u = len > 0.0 ? (progress_ - cumulative_[segment_]) / len : 0.0;
  out.push_back(w[segment_] + (w[segment_ + 1] - w[segment_]) * u);
  for (std::size_t i = segment_ + 1; i < w.size(); ++i) out.push_back(w[i]);
  return out;
}

}  // namespace fuzznav::nav
