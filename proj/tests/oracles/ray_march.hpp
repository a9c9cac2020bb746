#pragma once

// Brute-force range oracle: walk along the ray in fixed steps until the
// sample point falls inside any disc or the range limit is reached.

#include <cmath>
#include <vector>

#include "fuzznav/sensors.hpp"

namespace oracle {

inline double ray_march(fuzznav::Vec2 origin, double angle, const std::vector<fuzznav::sensors::Obstacle>& world,
                        double max_range, double step) {
  const double cx = std::cos(angle), cy = std::sin(angle);
  const long n = static_cast<long>(std::ceil(max_range / step));
  for (long k = 0; k <= n; ++k) {
    const double t = std::min(k * step, max_range);
    const double px = origin.x + t * cx, py = origin.y + t * cy;
    for (const auto& ob : world) {
      const double dx = px - ob.center.x, dy = py - ob.center.y;
      if (dx * dx + dy * dy <= ob.radius * ob.radius) return t;
    }
  }
  return max_range;
}

}  // namespace oracle
