#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "symopt/abstraction.hpp"
#include "symopt/config.hpp"
#include "symopt/refine.hpp"
#include "symopt/synthesis.hpp"

namespace symopt {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitEmptyWinningSet = 3,
  kExitCertification = 4,
};

/* struct: Problem
 *
 * the finite game a config describes: the abstraction of a grid problem
 * (or the explicit system) with its target and obstacle sets lifted to
 * states
 */
struct Problem {
  std::optional<Model> model;
  std::optional<Abstraction> abstraction;
  FiniteSystem explicit_system;
  StateSet target_under;  // floor(W): target of the upper bound
  StateSet target_over;   // ceil(W): target of the lower bound
  StateSet unsafe;        // cells meeting an obstacle
  StateSet blocked;       // cells inside an obstacle

  [[nodiscard]] const FiniteSystem& system() const noexcept {
    return abstraction ? abstraction->system : explicit_system;
  }
};

/* lifts the config's sets onto a built (or loaded) system */
[[nodiscard]] Problem make_problem(const ProblemConfig& cfg, Abstraction abstraction);
[[nodiscard]] Problem make_problem(const ProblemConfig& cfg, FiniteSystem explicit_system);
/* builds the abstraction or reads the explicit system file */
[[nodiscard]] Problem build_problem(const ProblemConfig& cfg, unsigned threads);

struct Synthesis {
  SafeReachResult reach;  // upper bound and controller
  EntryTimeTable lower;   // optimistic entry times to ceil(W)
};

/* Upper bound: safety (avoid `unsafe`) then time-optimal reach of floor(W).
 * Lower bound: optimistic reach of ceil(W) with the cells inside obstacles
 * made blocking and removed from the target, since no concrete run visits
 * them. */
[[nodiscard]] Synthesis synthesize(const Problem& problem);

struct SimulationResult {
  Vector x0;
  std::optional<StateIndex> cell;  // related initial cell used for the bounds
  Trace trace;
  Certification certification;
  std::size_t obstacle_hits = 0;  // trace states inside an obstacle box or unsafe cell

  [[nodiscard]] bool pass() const noexcept { return certification.pass() && obstacle_hits == 0; }
};

[[nodiscard]] SimulationResult simulate_from(const ProblemConfig& cfg, const Problem& problem,
                                             const SymbolicController& controller,
                                             const EntryTimeTable& lower, std::span<const double> x0);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // overrides output.dir
  unsigned threads = 1;
  bool timestamp = true;
};

/* CLI subcommands; they print a summary to `log`, diagnostics to `err`,
 * and return an ExitCode. Files written to the output directory:
 *   abstract     system.sts
 *   synthesize   controller.ctl, bounds.csv
 *   simulate     trace_<i>.csv, certification.txt
 *   export-plot  plot.csv
 *   bounds       nothing (prints the bounds of the initial states)
 * Later stages reuse the files of earlier ones when present and build
 * what is missing in memory. */
int run_abstract(const ProblemConfig& cfg, const RunOptions& opts, std::ostream& log, std::ostream& err);
int run_synthesize(const ProblemConfig& cfg, const RunOptions& opts, std::ostream& log, std::ostream& err);
int run_simulate(const ProblemConfig& cfg, const RunOptions& opts, std::ostream& log, std::ostream& err);
int run_export_plot(const ProblemConfig& cfg, const RunOptions& opts, std::ostream& log, std::ostream& err);
int run_bounds(const ProblemConfig& cfg, const RunOptions& opts, std::ostream& log, std::ostream& err);

/* dispatches by subcommand name and maps exceptions to exit codes */
int run_command(const std::string& command, const std::filesystem::path& config_path,
                const RunOptions& opts, std::ostream& log, std::ostream& err);

}  // namespace symopt
