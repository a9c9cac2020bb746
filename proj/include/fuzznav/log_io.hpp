#pragma once

#include <string>

#include <json.hpp>

#include "fuzznav/sim.hpp"

namespace fuzznav::sim {

inline constexpr const char* kTrajectoryHeader = "t,x,y,theta,fx,fy,front,back,left,right,wl_cmd,wr_cmd,Vl,Vr,wl,wr";

/// Shortest representation that reads back to the same double.
std::string format_double(double v);

/// One row per tick under kTrajectoryHeader, '\n' line endings.
std::string trajectory_csv(const TrajectoryLog& log);

/// Non-finite values are written as null.
nlohmann::json metrics_json(const Metrics& m, const TrajectoryLog& log);
nlohmann::json plans_json(const TrajectoryLog& log);

}  // namespace fuzznav::sim
