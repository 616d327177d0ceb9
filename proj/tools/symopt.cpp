// symopt: abstraction, synthesis and closed-loop simulation from a config file.
#include <algorithm>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "symopt/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Time-optimal controller synthesis on grid abstractions"};
  app.require_subcommand(1, 1);

  std::string config;
  std::string out;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool no_timestamp = false;

  const std::pair<const char*, const char*> commands[] = {
      {"abstract", "build the finite abstraction and write system.sts"},
      {"synthesize", "solve for the controller and write controller.ctl and bounds.csv"},
      {"simulate", "run the refined controller from every simulation.initial state"},
      {"export-plot", "write the refined controller table as plot.csv"},
      {"bounds", "print lower and upper entry-time bounds"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "problem description")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides output.dir)");
    sub->add_option("--threads", threads, "worker threads for the abstraction")->check(CLI::PositiveNumber);
    sub->add_flag("--no-timestamp", no_timestamp, "omit the generated-at comment from output files");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? symopt::kExitOk : symopt::kExitConfig;
  }

  symopt::RunOptions opts;
  if (!out.empty()) opts.out_dir = out;
  opts.threads = threads;
  opts.timestamp = !no_timestamp;
  const std::string command = app.get_subcommands().front()->get_name();
  return symopt::run_command(command, config, opts, std::cout, std::cerr);
}
