#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "symopt/abstraction.hpp"
#include "symopt/refine.hpp"

namespace symopt {

/*
 * Problem description read from a line-oriented file:
 *
 *   # comment
 *   section.key = value
 *
 * Values are numbers (`pi`, `-pi`, `2*pi`, `pi/2` are accepted), booleans
 * (true/false), words, bracketed lists `[a, b, c]`, or boxes written as a
 * product of intervals `[lo, hi] x [lo, hi]`. Keys marked (repeatable) may
 * appear more than once; any other repeated or unknown key is an error.
 *
 *   model.id             double_integrator | unicycle | explicit
 *   model.system         STS1 file for model.id = explicit (relative to the config)
 *   model.growth_L       unicycle: constant 3x3 contraction matrix, row major;
 *                        default is the input dependent bound from |v|
 *   model.substeps       RK4 substeps per period (default 10)
 *   grid.tau grid.eta grid.mu
 *   grid.domain          box
 *   grid.inputs          box
 *   grid.periodic        list of booleans, one per state axis
 *   grid.overlap         interior (default) | closed
 *   target.box           box (repeatable)
 *   target.ball          [center...] radius (infinity norm, repeatable)
 *   target.ignore        list of booleans, axes left unconstrained
 *   target.states        explicit systems: list of target states
 *   obstacles.box        box (repeatable)
 *   obstacles.ignore     list of booleans, as target.ignore
 *   safety.unsafe_states explicit systems: list of unsafe states
 *   simulation.initial   list, one initial state (repeatable)
 *   simulation.max_steps default 1000
 *   simulation.policy    value-greedy (default) | first-enabled
 *   output.dir           default "out" (relative to the working directory)
 *   output.timestamp     default true
 */
enum class ModelId { DoubleIntegrator, Unicycle, Explicit };

struct ProblemConfig {
  std::filesystem::path source;  // directory of the config file
  ModelId model = ModelId::DoubleIntegrator;
  std::filesystem::path system_file;
  std::optional<std::vector<double>> growth_l;
  std::size_t substeps = 10;

  GridSpec grid;
  TargetSpec target;
  std::vector<StateIndex> target_states;
  TargetSpec obstacles;
  std::vector<StateIndex> unsafe_states;

  std::vector<Vector> initial;
  std::size_t max_steps = 1000;
  InputPolicy policy = InputPolicy::ValueGreedy;

  std::filesystem::path output_dir = "out";
  bool timestamp = true;

  [[nodiscard]] bool is_explicit() const noexcept { return model == ModelId::Explicit; }
  [[nodiscard]] bool has_obstacles() const noexcept {
    return !obstacles.boxes.empty() || !unsafe_states.empty();
  }
  /* the model for grid problems; throws ConfigError for explicit ones */
  [[nodiscard]] Model make_model() const;
  [[nodiscard]] SampledFlow flow() const { return SampledFlow{grid.tau, substeps}; }
};

/* throws ConfigError with the line number */
[[nodiscard]] ProblemConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
[[nodiscard]] ProblemConfig load_config(const std::filesystem::path& path);

}  // namespace symopt
