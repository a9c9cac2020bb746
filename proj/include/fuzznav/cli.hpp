#pragma once

// fuzznav command line: run, batch, validate, plot and rules subcommands.

#include <iosfwd>
#include <string>

#include "fuzznav/navigator.hpp"

namespace fuzznav::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;      // usage, parse or validation error
inline constexpr int kExitUnreachable = 2;  // goal inside a keep-out region

/// Commanded wheel speeds over a grid x grid slice of direction error by front
/// distance, with the goal 10 m away and the other sides clear.
std::string response_surface_csv(const nav::NavigationEngine& engine, int grid);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fuzznav::cli
