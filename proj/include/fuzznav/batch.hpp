#pragma once

// Seeded batches: one scenario, seeds base..base+n-1, fanned out over threads
// and reduced in seed order.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuzznav/sim.hpp"

namespace fuzznav::sim {

struct RunSummary {
  std::uint64_t seed = 0;
  bool ok = false;  // false when the seed failed before stepping
  std::string error;
  Metrics metrics;
};

struct BatchSummary {
  std::vector<RunSummary> runs;  // in seed order
  int reached = 0;
  int collisions = 0;
  int timeouts = 0;
  int failures = 0;
  double reach_rate = 0.0;
  double collision_rate = 0.0;
  double mean_time_to_goal = 0.0;  // over reached runs; NaN if none
};

/// Worker count from FUZZNAV_THREADS, else the hardware concurrency.
int batch_threads_from_env();

BatchSummary run_batch(const Scenario& s, int runs, std::uint64_t base_seed, int threads);

/// Aggregate figures from per-seed results.
BatchSummary reduce_runs(std::vector<RunSummary> runs);

std::string batch_runs_csv(const BatchSummary& b);
std::string batch_summary_csv(const BatchSummary& b);
nlohmann::json batch_json(const BatchSummary& b);

}  // namespace fuzznav::sim
