#include "fuzznav/cli.hpp"

#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "fuzznav/atomic_file.hpp"
#include "fuzznav/batch.hpp"
#include "fuzznav/log_io.hpp"
#include "fuzznav/scenario_io.hpp"
#include "fuzznav/svg_plot.hpp"

namespace fuzznav::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string response_surface_csv(const nav::NavigationEngine& engine, int grid) {
  const auto& rb = engine.engine().rule_base();
  const auto& dir = rb.inputs[1];
  const auto& front = rb.inputs[2];
  std::string out = "direction_error,obstacle_front,left_speed,right_speed\n";
  for (int i = 0; i < grid; ++i) {
    const double e = dir.lo() + (dir.hi() - dir.lo()) * i / (grid - 1);
    for (int j = 0; j < grid; ++j) {
      nav::NavInputs in;
      in.target_distance = 10.0;
      in.target_direction_error = e;
      in.obstacle_front = front.lo() + (front.hi() - front.lo()) * j / (grid - 1);
      in.obstacle_back = rb.inputs[3].hi();
      in.obstacle_left = rb.inputs[4].hi();
      in.obstacle_right = rb.inputs[5].hi();
      const nav::WheelCommand c = nav::control_step(in, engine);
      out += sim::format_double(in.target_direction_error) + ',' + sim::format_double(in.obstacle_front) + ',' +
             sim::format_double(c.omega_left) + ',' + sim::format_double(c.omega_right) + '\n';
    }
  }
  return out;
}

namespace {

struct Options {
  std::string scenario;
  std::string engine;
  std::string out_dir = "fuzznav_out";
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  int runs = 100;
  int grid = 21;
  int validation_grid = 5;
  bool svg = false;
  bool quiet = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

sim::Scenario load(const Options& o) {
  sim::Scenario s = sim::load_scenario(o.scenario);
  if (o.seed) s.seed = *o.seed;
  if (o.dt) {
    if (!(*o.dt > 0.0)) throw UsageError("--dt must be positive");
    // A controller that ran every step keeps doing so.
    if (s.control_period == s.dt) s.control_period = *o.dt;
    s.dt = *o.dt;
  }
  return s;
}

void write(const fs::path& dir, const std::string& name, std::string_view content) {
  write_file_atomic(dir / name, content);
}

fs::path output_dir(const Options& o) {
  const fs::path dir = o.out_dir;
  fs::create_directories(dir);
  return dir;
}

std::string fixed(double v, int digits) {
  if (!std::isfinite(v)) return "n/a";
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

void write_plots(const fs::path& dir, const sim::TrajectoryLog& log) {
  write(dir, "path.svg", path_svg(log));
  write(dir, "speeds.svg", speeds_svg(log));
  write(dir, "tracking_error.svg", tracking_error_svg(log));
}

void report_run(std::ostream& out, const sim::TrajectoryLog& log, const sim::Metrics& m) {
  out << log.name << " seed " << log.seed << ": " << sim::to_string(m.status) << " at " << fixed(m.end_time, 2)
      << " s, path " << fixed(m.path_length, 2) << " m, final distance " << fixed(m.final_distance, 3)
      << " m, min clearance " << (std::isfinite(m.min_obstacle_clearance) ? fixed(m.min_obstacle_clearance, 3) + " m" : "none")
      << ", tracking mean "
      << fixed(m.mean_tracking_error, 3) << " m max " << fixed(m.max_tracking_error, 3) << " m, " << m.replans
      << " replans\n";
}

int cmd_run(const Options& o, bool plots_only, std::ostream& out) {
  const sim::Scenario s = load(o);
  const sim::TrajectoryLog log = sim::run_scenario(s);
  const sim::Metrics m = sim::metrics(log);
  const fs::path dir = output_dir(o);
  if (!plots_only) {
    write(dir, "trajectory.csv", sim::trajectory_csv(log));
    write(dir, "metrics.json", sim::metrics_json(m, log).dump(2) + "\n");
    write(dir, "plans.json", sim::plans_json(log).dump(2) + "\n");
  }
  if (plots_only || o.svg) write_plots(dir, log);
  if (!o.quiet) {
    report_run(out, log, m);
    out << "wrote " << dir.string() << "\n";
  }
  return kExitOk;
}

int cmd_batch(const Options& o, std::ostream& out) {
  if (o.runs < 1) throw UsageError("--runs must be at least 1");
  const sim::Scenario s = load(o);
  // Fail fast on a scenario no seed can run.
  if (!s.random_world) sim::validate(s);
  const std::uint64_t base = o.seed.value_or(s.seed);
  const sim::BatchSummary b = sim::run_batch(s, o.runs, base, sim::batch_threads_from_env());
  const fs::path dir = output_dir(o);
  write(dir, "batch_runs.csv", sim::batch_runs_csv(b));
  write(dir, "batch_summary.csv", sim::batch_summary_csv(b));
  write(dir, "batch_summary.json", sim::batch_json(b).dump(2) + "\n");
  if (!o.quiet) {
    out << s.name << " seeds " << base << ".." << base + static_cast<std::uint64_t>(o.runs) - 1 << ": " << b.reached
        << "/" << b.runs.size() << " reached, " << b.collisions << " collisions, " << b.timeouts << " timeouts, "
        << b.failures << " failed, mean time to goal " << fixed(b.mean_time_to_goal, 2) << " s\n";
    out << "wrote " << dir.string() << "\n";
  }
  return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
  const sim::Scenario s = load(o);
  const nav::NavigationEngine engine = sim::scenario_engine(s);
  const sim::Scenario m = sim::materialize(s);
  sim::validate(m);
  if (!o.quiet) {
    out << s.name << ": valid, " << m.obstacles.size() << " obstacles, " << engine.engine().rule_base().rules.size()
        << " rules, " << sim::control_ticks(m) << " physics steps per control update\n";
  }
  return kExitOk;
}

int cmd_rules(const Options& o, std::ostream& out) {
  if (o.grid < 2) throw UsageError("--grid must be at least 2");
  if (o.validation_grid < 2) throw UsageError("--validation-grid must be at least 2");
  json doc = nav::default_engine_document();
  double omega_max = nav::EngineBuildOptions{}.omega_max;
  if (!o.engine.empty()) {
    doc = sim::parse_json_text(sim::read_text_file(o.engine), o.engine);
  } else if (!o.scenario.empty()) {
    const sim::Scenario s = load(o);
    if (s.engine) doc = *s.engine;
    omega_max = s.controller.omega_max;
  }
  fuzzy::RuleBase rb = nav::navigation_rule_base(doc, omega_max);
  const fuzzy::ValidationReport report = fuzzy::validate_rulebase(rb, o.validation_grid);
  const nav::NavigationEngine engine(fuzzy::Engine(std::move(rb)), omega_max);
  const auto& base = engine.engine().rule_base();

  out << base.rules.size() << " rules, " << report.grid_points << " grid points: ";
  if (report.ok()) {
    out << "complete, 0 conflicts\n";
  } else {
    out << report.gaps.size() << " gaps, " << report.conflicts.size() << " conflicts\n";
    constexpr std::size_t kShown = 20;
    for (std::size_t i = 0; i < report.gaps.size() && i < kShown; ++i) {
      out << "  gap:";
      for (std::size_t k = 0; k < report.gaps[i].size(); ++k) {
        out << ' ' << base.inputs[k].name() << '=' << sim::format_double(report.gaps[i][k]);
      }
      out << '\n';
    }
    if (report.gaps.size() > kShown) out << "  ... " << report.gaps.size() - kShown << " more gaps\n";
    for (std::size_t i = 0; i < report.conflicts.size() && i < kShown; ++i) {
      out << "  conflict: rules " << report.conflicts[i].first << " and " << report.conflicts[i].second << '\n';
    }
  }
  const fs::path dir = output_dir(o);
  write(dir, "response_surface.csv", response_surface_csv(engine, o.grid));
  if (!o.quiet) out << "wrote " << (dir / "response_surface.csv").string() << "\n";
  return report.ok() ? kExitOk : kExitInvalid;
}

int unreachable(std::ostream& err, std::string_view what) {
  constexpr std::string_view kPrefix = "unreachable goal";
  err << "error: " << (what.starts_with(kPrefix) ? "" : "unreachable goal: ") << what << "\n";
  return kExitUnreachable;
}

void add_scenario(CLI::App* cmd, Options& o, bool required) {
  auto* opt = cmd->add_option("--scenario", o.scenario, "Scenario JSON file");
  opt->type_name("PATH");
  if (required) opt->required();
}

void add_out(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out_dir, "Output directory, created if missing")->type_name("DIR")->capture_default_str();
}

void add_overrides(CLI::App* cmd, Options& o, const std::string& seed_help) {
  cmd->add_option("--seed", o.seed, seed_help)->type_name("N");
  cmd->add_option("--dt", o.dt, "Physics step override in seconds")->type_name("SECONDS");
}

void add_quiet(CLI::App* cmd, Options& o) { cmd->add_flag("--quiet", o.quiet, "Print nothing on success"); }

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fuzzy-logic navigation for a differential-drive robot: simulate scenarios, run seeded batches, "
               "check rule bases.",
               "fuzznav"};
  app.require_subcommand(1);
  app.footer("Exit codes: 0 success (a timed-out run included), 1 usage, parse or validation error, "
             "2 unreachable goal.\nFUZZNAV_THREADS caps the batch worker count.");
  Options o;

  auto* run = app.add_subcommand("run", "Simulate one scenario; writes trajectory.csv, metrics.json, plans.json");
  add_scenario(run, o, true);
  add_out(run, o);
  add_overrides(run, o, "Seed override");
  run->add_flag("--svg", o.svg, "Also write path.svg, speeds.svg and tracking_error.svg");
  add_quiet(run, o);

  auto* batch = app.add_subcommand("batch", "Run seeds N..N+runs-1; writes batch_runs.csv, batch_summary.csv/.json");
  add_scenario(batch, o, true);
  add_out(batch, o);
  add_overrides(batch, o, "First seed (defaults to the scenario seed)");
  batch->add_option("--runs", o.runs, "Number of seeds")->type_name("N")->capture_default_str();
  add_quiet(batch, o);

  auto* validate = app.add_subcommand("validate", "Check a scenario and its rule base without simulating");
  add_scenario(validate, o, true);
  add_overrides(validate, o, "Seed override (random worlds)");
  add_quiet(validate, o);

  auto* plot = app.add_subcommand("plot", "Simulate one scenario and write only the three SVG plots");
  add_scenario(plot, o, true);
  add_out(plot, o);
  add_overrides(plot, o, "Seed override");
  add_quiet(plot, o);

  auto* rules = app.add_subcommand("rules", "Validate a rule base and write response_surface.csv");
  rules->add_option("--engine", o.engine, "Engine JSON file (default: the built-in table)")->type_name("PATH");
  add_scenario(rules, o, false);
  add_out(rules, o);
  rules->add_option("--grid", o.grid, "Slice resolution per axis; the CSV has grid^2 rows")
      ->type_name("N")
      ->capture_default_str();
  rules->add_option("--validation-grid", o.validation_grid, "Points per input for the completeness check")
      ->type_name("N")
      ->capture_default_str();
  add_quiet(rules, o);
  rules->get_option("--engine")->excludes(rules->get_option("--scenario"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*run) return cmd_run(o, false, out);
    if (*batch) return cmd_batch(o, out);
    if (*validate) return cmd_validate(o, out);
    if (*plot) return cmd_run(o, true, out);
    return cmd_rules(o, out);
  } catch (const nav::UnreachableGoal& e) {
    return unreachable(err, e.what());
  } catch (const nav::NoPathFound& e) {
    return unreachable(err, e.what());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace fuzznav::cli
