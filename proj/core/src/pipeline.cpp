#include "symopt/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "symopt/errors.hpp"
#include "symopt/formats.hpp"

namespace symopt {

namespace {

StateSet from_list(std::size_t n, const std::vector<StateIndex>& xs, const char* what) {
  StateSet s(n);
  for (StateIndex x : xs) {
    if (x >= n)
      throw ConfigError(std::string(what) + " lists state " + std::to_string(x) + " but the system has " +
                        std::to_string(n) + " states");
    s.insert(x);
  }
  return s;
}

FiniteSystem read_explicit(const ProblemConfig& cfg) {
  std::ifstream in(cfg.system_file);
  if (!in) throw ConfigError("cannot open system file '" + cfg.system_file.string() + "'");
  return read_system(in).system;
}

std::filesystem::path out_dir(const ProblemConfig& cfg, const RunOptions& opts) {
  return opts.out_dir ? *opts.out_dir : cfg.output_dir;
}

bool stamped(const ProblemConfig& cfg, const RunOptions& opts) { return opts.timestamp && cfg.timestamp; }

/* writes text; the timestamp comment goes after the magic line of STS1/CTL1
 * files and first everywhere else */
void write_file(const std::filesystem::path& path, const std::string& text, bool timestamp, bool has_magic) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  if (!timestamp) {
    out << text;
  } else if (has_magic) {
    const auto nl = text.find('\n');
    out << text.substr(0, nl + 1) << timestamp_comment() << '\n' << text.substr(nl + 1);
  } else {
    out << timestamp_comment() << '\n' << text;
  }
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/* system from <out>/system.sts when it matches the config, else built */
Problem load_problem(const ProblemConfig& cfg, const RunOptions& opts, std::ostream& log) {
  if (cfg.is_explicit()) return make_problem(cfg, read_explicit(cfg));
  const auto path = out_dir(cfg, opts) / "system.sts";
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    SystemFile file = read_system(in);
    if (!file.grid || !(*file.grid == cfg.grid))
      throw ConfigError("'" + path.string() + "' was built for a different grid; rerun abstract");
    log << "using " << path.string() << '\n';
    const Model model = cfg.make_model();
    return make_problem(cfg, attach_system(model, cfg.grid, cfg.flow(), std::move(file.system)));
  }
  return build_problem(cfg, opts.threads);
}

struct Solved {
  Problem problem;
  SymbolicController controller;
  EntryTimeTable lower;
};

/* controller and bounds from the output directory when both are there */
Solved load_solved(const ProblemConfig& cfg, const RunOptions& opts, std::ostream& log) {
  Problem problem = load_problem(cfg, opts, log);
  const auto dir = out_dir(cfg, opts);
  const auto ctl_path = dir / "controller.ctl";
  const auto bounds_path = dir / "bounds.csv";
  const std::size_t n = problem.system().num_states();
  if (std::filesystem::exists(ctl_path) && std::filesystem::exists(bounds_path)) {
    std::ifstream cin(ctl_path);
    SymbolicController ctl = read_controller(cin);
    std::ifstream bin(bounds_path);
    const auto rows = read_bounds(bin);
    if (ctl.num_states() != n || ctl.num_inputs() != problem.system().num_inputs() || rows.size() != n)
      throw ConfigError("controller or bounds in '" + dir.string() + "' do not fit the system; rerun synthesize");
    std::vector<std::uint32_t> levels(n, kUnreachable);
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].state != i) throw ConfigError("bounds.csv rows are not in state order");
      levels[i] = saturating_add(rows[i].lower, 1);
    }
    log << "using " << ctl_path.string() << " and " << bounds_path.string() << '\n';
    return Solved{std::move(problem), std::move(ctl), EntryTimeTable(SolveMode::Optimistic, std::move(levels), 0)};
  }
  Synthesis syn = synthesize(problem);
  return Solved{std::move(problem), std::move(syn.reach.controller), std::move(syn.lower)};
}

std::string point_text(std::span<const double> x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + format_number(x[i]);
  return s + ")";
}

}  // namespace

Problem make_problem(const ProblemConfig& cfg, Abstraction abstraction) {
  Problem p;
  p.model = cfg.make_model();
  const Quantizer& q = abstraction.quantizer;
  p.target_under = target_under(q, cfg.target);
  p.target_over = target_over(q, cfg.target);
  if (cfg.obstacles.boxes.empty()) {
    p.unsafe = StateSet(q.num_cells());
    p.blocked = StateSet(q.num_cells());
  } else {
    p.unsafe = target_over(q, cfg.obstacles);
    p.blocked = target_under(q, cfg.obstacles);
  }
  p.abstraction = std::move(abstraction);
  return p;
}

Problem make_problem(const ProblemConfig& cfg, FiniteSystem explicit_system) {
  Problem p;
  const std::size_t n = explicit_system.num_states();
  p.target_under = from_list(n, cfg.target_states, "target.states");
  p.target_over = p.target_under;
  p.unsafe = from_list(n, cfg.unsafe_states, "safety.unsafe_states");
  p.blocked = p.unsafe;
  p.explicit_system = std::move(explicit_system);
  return p;
}

Problem build_problem(const ProblemConfig& cfg, unsigned threads) {
  if (cfg.is_explicit()) return make_problem(cfg, read_explicit(cfg));
  const Model model = cfg.make_model();
  return make_problem(cfg, build_abstraction(model, cfg.grid, cfg.flow(), threads));
}

Synthesis synthesize(const Problem& problem) {
  const FiniteSystem& sys = problem.system();
  Synthesis s;
  s.reach = synthesize_safe_reach(sys, problem.unsafe.complement(), problem.target_under);
  if (problem.blocked.empty()) {
    s.lower = solve_optimistic(sys, problem.target_over);
  } else {
    // no concrete run visits a blocked cell, so it neither passes through
    // one nor ends its run there
    InputSets allowed = all_enabled_inputs(sys);
    for (StateIndex x : problem.blocked.indices()) allowed[x].clear();
    StateSet target = problem.target_over;
    target -= problem.blocked;
    s.lower = solve_optimistic(restrict(sys, allowed), target);
  }
  return s;
}

SimulationResult simulate_from(const ProblemConfig& cfg, const Problem& problem,
                               const SymbolicController& controller, const EntryTimeTable& lower,
                               std::span<const double> x0) {
  if (!problem.abstraction || !problem.model)
    throw ConfigError("simulation needs a continuous model; explicit systems cannot be simulated");
  const Abstraction& abs = *problem.abstraction;
  const RefinedController rc(controller, abs, &abs.system, cfg.policy);
  SimulationResult r;
  r.x0.assign(x0.begin(), x0.end());
  r.trace = simulate(*problem.model, abs.flow, rc, x0, cfg.target, cfg.max_steps);

  // bounds of the cell the controller started from (the best related cell)
  std::uint32_t lo = kUnreachable, up = kUnreachable;
  if (!r.trace.steps.empty() && r.trace.steps.front().cell != std::numeric_limits<StateIndex>::max()) {
    r.cell = r.trace.steps.front().cell;
    lo = lower.entry_time(*r.cell);
    up = controller.value(*r.cell);
  }
  r.certification = certify(r.trace, lo, up);
  for (const TraceStep& s : r.trace.steps) {
    const bool in_box = !cfg.obstacles.boxes.empty() && cfg.obstacles.contains(s.x);
    const bool in_cell = s.cell != std::numeric_limits<StateIndex>::max() && problem.unsafe.contains(s.cell);
    if (in_box || in_cell) ++r.obstacle_hits;
  }
  return r;
}

int run_abstract(const ProblemConfig& cfg, const RunOptions& opts, std::ostream& log, std::ostream&) {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem p = build_problem(cfg, opts.threads);
  const double elapsed = seconds_since(t0);
  const FiniteSystem& sys = p.system();
  std::ostringstream text;
  write_system(text, sys, p.abstraction ? &p.abstraction->grid : nullptr);
  const auto path = out_dir(cfg, opts) / "system.sts";
  write_file(path, text.str(), stamped(cfg, opts), true);
  log << "states " << sys.num_states() << " inputs " << sys.num_inputs() << " transitions "
      << sys.num_transitions() << " enabled pairs " << sys.num_enabled_pairs() << '\n';
  if (p.abstraction) {
    log << "radius";
    for (double r : p.abstraction->radius) log << ' ' << format_number(r);
    log << '\n';
  }
  log << "build time " << std::fixed << std::setprecision(3) << elapsed << " s\n";
  log.unsetf(std::ios::fixed);
  log << "wrote " << path.string() << '\n';
  return kExitOk;
}

int run_synthesize(const ProblemConfig& cfg, const RunOptions& opts, std::ostream& log, std::ostream& err) {
  const Problem p = load_problem(cfg, opts, log);
  const auto t0 = std::chrono::steady_clock::now();
  const Synthesis s = synthesize(p);
  const double elapsed = seconds_since(t0);
  const auto dir = out_dir(cfg, opts);
  std::ostringstream ctl, bounds;
  write_controller(ctl, s.reach.controller);
  write_bounds(bounds, s.lower, s.reach.controller);
  write_file(dir / "controller.ctl", ctl.str(), stamped(cfg, opts), true);
  write_file(dir / "bounds.csv", bounds.str(), stamped(cfg, opts), false);
  const std::size_t winning = s.reach.controller.winning_set().count();
  log << "floor(W) " << p.target_under.count() << " ceil(W) " << p.target_over.count() << " unsafe "
      << p.unsafe.count() << '\n';
  log << "safe states " << s.reach.safety.domain.count() << " winning states " << winning
      << " iterations " << s.reach.table.iterations() << '\n';
  log << "synthesis time " << std::fixed << std::setprecision(3) << elapsed << " s\n";
  log.unsetf(std::ios::fixed);
  log << "wrote " << (dir / "controller.ctl").string() << ' ' << (dir / "bounds.csv").string() << '\n';
  if (winning == 0) {
    err << "warning: the winning set is empty\n";
    return kExitEmptyWinningSet;
  }
  return kExitOk;
}

int run_simulate(const ProblemConfig& cfg, const RunOptions& opts, std::ostream& log, std::ostream& err) {
  if (cfg.is_explicit()) throw ConfigError("explicit systems cannot be simulated");
  if (cfg.initial.empty()) throw ConfigError("simulation.initial is required for simulate");
  const Solved solved = load_solved(cfg, opts, log);
  if (solved.controller.winning_set().empty()) {
    err << "warning: the winning set is empty\n";
    return kExitEmptyWinningSet;
  }
  const auto dir = out_dir(cfg, opts);
  const Abstraction& abs = *solved.problem.abstraction;
  std::ostringstream report;
  bool all_pass = true;
  for (std::size_t i = 0; i < cfg.initial.size(); ++i) {
    const SimulationResult r = simulate_from(cfg, solved.problem, solved.controller, solved.lower, cfg.initial[i]);
    std::ostringstream trace;
    write_trace(trace, r.trace, abs.quantizer.dim(), abs.inputs.dim());
    write_file(dir / ("trace_" + std::to_string(i) + ".csv"), trace.str(), stamped(cfg, opts), false);
    std::ostringstream line;
    line << "initial " << point_text(r.x0) << " cell " << (r.cell ? std::to_string(*r.cell) : "none")
         << " lower " << format_level(r.certification.lower) << " upper "
         << format_level(r.certification.upper) << " achieved " << r.trace.achieved << " reason "
         << to_string(r.trace.reason) << " obstacle_hits " << r.obstacle_hits << ' '
         << (r.pass() ? "PASS" : "FAIL");
    report << line.str() << '\n';
    log << line.str() << '\n';
    all_pass = all_pass && r.pass();
  }
  write_file(dir / "certification.txt", report.str(), stamped(cfg, opts), false);
  if (!all_pass) {
    err << "certification failed\n";
    return kExitCertification;
  }
  return kExitOk;
}

int run_export_plot(const ProblemConfig& cfg, const RunOptions& opts, std::ostream& log, std::ostream&) {
  const Solved solved = load_solved(cfg, opts, log);
  std::ostringstream text;
  if (solved.problem.abstraction) {
    const RefinedController rc(solved.controller, *solved.problem.abstraction,
                               &solved.problem.abstraction->system, cfg.policy);
    write_plot(text, rc);
  } else {
    write_plot(text, solved.controller, solved.problem.system(), cfg.policy);
  }
  const auto path = out_dir(cfg, opts) / "plot.csv";
  write_file(path, text.str(), stamped(cfg, opts), false);
  log << "wrote " << path.string() << " (" << solved.controller.winning_set().count() << " rows)\n";
  return kExitOk;
}

int run_bounds(const ProblemConfig& cfg, const RunOptions& opts, std::ostream& log, std::ostream&) {
  const Solved solved = load_solved(cfg, opts, log);
  if (cfg.initial.empty() || !solved.problem.abstraction) {
    write_bounds(log, solved.lower, solved.controller);
    return kExitOk;
  }
  const Quantizer& q = solved.problem.abstraction->quantizer;
  log << "initial,cell,lower,upper\n";
  for (const Vector& x : cfg.initial) {
    const auto cells = q.related(x);
    log << '"' << point_text(x) << "\",";
    if (cells.empty()) {
      log << ",inf,inf\n";
      continue;
    }
    StateIndex best = cells.front();
    for (StateIndex c : cells)
      if (solved.controller.value(c) < solved.controller.value(best)) best = c;
    log << best << ',' << format_level(solved.lower.entry_time(best)) << ','
        << format_level(solved.controller.value(best)) << '\n';
  }
  return kExitOk;
}

int run_command(const std::string& command, const std::filesystem::path& config_path,
                const RunOptions& opts, std::ostream& log, std::ostream& err) {
  try {
    const ProblemConfig cfg = load_config(config_path);
    if (command == "abstract") return run_abstract(cfg, opts, log, err);
    if (command == "synthesize") return run_synthesize(cfg, opts, log, err);
    if (command == "simulate") return run_simulate(cfg, opts, log, err);
    if (command == "export-plot") return run_export_plot(cfg, opts, log, err);
    if (command == "bounds") return run_bounds(cfg, opts, log, err);
    err << "error: unknown command '" << command << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace symopt
