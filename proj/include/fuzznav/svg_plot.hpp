#pragma once

// SVG views of a trajectory log. Data series sit inside a
// <g transform="matrix(...)"> in raw world or data units, formatted like the
// CSV, so coordinates read back from the file compare exactly with the log.

#include <string>
#include <string_view>

#include "fuzznav/sim.hpp"

namespace fuzznav::cli {

std::string xml_escape(std::string_view s);

/// Top view: obstacles, planned paths, driven path, start and goal.
std::string path_svg(const sim::TrajectoryLog& log);
/// Commanded and measured wheel speeds against time.
std::string speeds_svg(const sim::TrajectoryLog& log);
/// Tracking error against the active plan, with replan markers.
std::string tracking_error_svg(const sim::TrajectoryLog& log);

}  // namespace fuzznav::cli
