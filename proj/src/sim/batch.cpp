#include "fuzznav/batch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "fuzznav/log_io.hpp"

namespace fuzznav::sim {

using nlohmann::json;

int batch_threads_from_env() {
  if (const char* env = std::getenv("FUZZNAV_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<int>(std::min(n, 1024L));
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

BatchSummary reduce_runs(std::vector<RunSummary> runs) {
  std::sort(runs.begin(), runs.end(), [](const RunSummary& a, const RunSummary& b) { return a.seed < b.seed; });
  BatchSummary b;
  double time_sum = 0.0;
  for (const auto& r : runs) {
    if (!r.ok) {
      ++b.failures;
      continue;
    }
    switch (r.metrics.status) {
      case Status::GoalReached:
        ++b.reached;
        time_sum += r.metrics.time_to_goal;
        break;
      case Status::Collision: ++b.collisions; break;
      case Status::Timeout: ++b.timeouts; break;
    }
  }
  const double n = static_cast<double>(runs.size());
  if (n > 0) {
    b.reach_rate = b.reached / n;
    b.collision_rate = b.collisions / n;
  }
  b.mean_time_to_goal = b.reached > 0 ? time_sum / b.reached : std::numeric_limits<double>::quiet_NaN();
  b.runs = std::move(runs);
  return b;
}

BatchSummary run_batch(const Scenario& s, int runs, std::uint64_t base_seed, int threads) {
  if (runs < 1) throw ScenarioError("batch needs at least one run");
  const nav::NavigationEngine engine = scenario_engine(s);
  std::vector<RunSummary> results(static_cast<std::size_t>(runs));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i; (i = next.fetch_add(1)) < runs;) {
      RunSummary& r = results[static_cast<std::size_t>(i)];
      r.seed = base_seed + static_cast<std::uint64_t>(i);
      Scenario sc = s;
      sc.seed = r.seed;
      try {
        r.metrics = metrics(run_scenario(sc, engine));
        r.ok = true;
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };
  const int n = std::clamp(threads, 1, runs);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < n; ++k) pool.emplace_back(worker);
  }
  return reduce_runs(std::move(results));
}

std::string batch_runs_csv(const BatchSummary& b) {
  std::string out =
      "seed,status,time_to_goal,path_length,final_distance,min_clearance,mean_tracking_error,max_tracking_error,"
      "collisions,replans,error\n";
  for (const auto& r : b.runs) {
    const auto& m = r.metrics;
    out += std::to_string(r.seed) + ',';
    out += r.ok ? to_string(m.status) : "Failed";
    for (double v : {m.time_to_goal, m.path_length, m.final_distance, m.min_obstacle_clearance, m.mean_tracking_error,
                     m.max_tracking_error}) {
      out += ',';
      if (r.ok && std::isfinite(v)) out += format_double(v);
    }
    out += ',' + std::to_string(m.collision_count) + ',' + std::to_string(m.replans) + ',';
    std::string err = r.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    if (!err.empty()) out += '"' + err + '"';
    out += '\n';
  }
  return out;
}

std::string batch_summary_csv(const BatchSummary& b) {
  std::string out = "runs,reached,collisions,timeouts,failures,reach_rate,collision_rate,mean_time_to_goal\n";
  out += std::to_string(b.runs.size()) + ',' + std::to_string(b.reached) + ',' + std::to_string(b.collisions) + ',' +
         std::to_string(b.timeouts) + ',' + std::to_string(b.failures) + ',' + format_double(b.reach_rate) + ',' +
         format_double(b.collision_rate) + ',' +
         (std::isfinite(b.mean_time_to_goal) ? format_double(b.mean_time_to_goal) : std::string()) + '\n';
  return out;
}

json batch_json(const BatchSummary& b) {
  return {{"runs", b.runs.size()},
          {"reached", b.reached},
          {"collisions", b.collisions},
          {"timeouts", b.timeouts},
          {"failures", b.failures},
          {"reach_rate", b.reach_rate},
          {"collision_rate", b.collision_rate},
          {"mean_time_to_goal", std::isfinite(b.mean_time_to_goal) ? json(b.mean_time_to_goal) : json(nullptr)}};
}

}  // namespace fuzznav::sim
