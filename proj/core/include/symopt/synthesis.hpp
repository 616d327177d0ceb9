#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "symopt/fts.hpp"

namespace symopt {

/* level of a state that never enters the fixed point */
inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

/* a + b saturating at kUnreachable */
[[nodiscard]] constexpr std::uint32_t saturating_add(std::uint32_t a, std::uint32_t b) noexcept {
  return (a == kUnreachable || b == kUnreachable || a > kUnreachable - b) ? kUnreachable : a + b;
}

enum class SolveMode {
  /* min-max: adversarial nondeterminism, upper bound */
  Pessimistic,
  /* min-min over the associated deterministic system, lower bound */
  Optimistic,
};

/* G_W(Z) = W u { x | exists u: Post_u(x) nonempty and "Post_u(x) fits Z" }
 * where "fits" is inclusion (pessimistic) or non-empty intersection
 * (optimistic, the determinized system) */
[[nodiscard]] StateSet apply_gw(const FiniteSystem& sys, const StateSet& target,
                                const StateSet& z, SolveMode mode);

/* class: EntryTimeTable
 *
 * level(x) = min{ k >= 1 : x in G_W^k(empty) }, kUnreachable when x never
 * enters the minimal fixed point; entry_time(x) = level(x) - 1
 */
class EntryTimeTable {
 public:
  EntryTimeTable() = default;
  EntryTimeTable(SolveMode mode, std::vector<std::uint32_t> levels, std::size_t iterations);

  [[nodiscard]] SolveMode mode() const noexcept { return mode_; }
  [[nodiscard]] std::size_t size() const noexcept { return levels_.size(); }
  [[nodiscard]] std::uint32_t level(StateIndex x) const { return levels_.at(x); }
  /* level - 1, or kUnreachable */
  [[nodiscard]] std::uint32_t entry_time(StateIndex x) const;
  [[nodiscard]] bool reachable(StateIndex x) const { return level(x) != kUnreachable; }
  /* the minimal fixed point Z */
  [[nodiscard]] StateSet winning_set() const;
  /* number of G_W applications that added states (the largest finite level) */
  [[nodiscard]] std::size_t iterations() const noexcept { return iterations_; }
  [[nodiscard]] const std::vector<std::uint32_t>& levels() const noexcept { return levels_; }

 private:
  SolveMode mode_ = SolveMode::Pessimistic;
  std::vector<std::uint32_t> levels_;
  std::size_t iterations_ = 0;
};

[[nodiscard]] EntryTimeTable solve_pessimistic(const FiniteSystem& sys, const StateSet& target);
[[nodiscard]] EntryTimeTable solve_optimistic(const FiniteSystem& sys, const StateSet& target);
[[nodiscard]] EntryTimeTable solve(const FiniteSystem& sys, const StateSet& target, SolveMode mode);

/* Least restrictive safety controller: the maximal fixed point of
 * F(Z) = { x in Safe | x in A or exists u: Post_u(x) nonempty and inside Z }
 * and, for every x in it, all inputs whose successors stay in it. States
 * of the absorbing set A (runs end there) stay in the fixed point even
 * without such an input; with A empty this is plain invariance. States
 * outside the fixed point get no inputs. */
struct SafetyController {
  InputSets allowed;
  StateSet domain;
};

[[nodiscard]] SafetyController solve_safety(const FiniteSystem& sys, const StateSet& safe,
                                            const StateSet& absorbing);
[[nodiscard]] SafetyController solve_safety(const FiniteSystem& sys, const StateSet& safe);

/* class: SymbolicController
 *
 * time-optimal controller for the abstraction: for every state of the
 * winning set its value (entry time) and the inputs it enables. Target
 * states carry value 0 and no inputs.
 */
class SymbolicController {
 public:
  SymbolicController() = default;
  SymbolicController(std::size_t num_states, std::size_t num_inputs,
                     std::vector<std::uint32_t> values, InputSets enabled);

  [[nodiscard]] std::size_t num_states() const noexcept { return values_.size(); }
  [[nodiscard]] std::size_t num_inputs() const noexcept { return num_inputs_; }
  /* entry time bound, kUnreachable outside the winning set */
  [[nodiscard]] std::uint32_t value(StateIndex x) const { return values_.at(x); }
  [[nodiscard]] const std::vector<InputIndex>& enabled(StateIndex x) const { return enabled_.at(x); }
  [[nodiscard]] bool in_domain(StateIndex x) const { return value(x) != kUnreachable; }
  [[nodiscard]] StateSet winning_set() const;
  [[nodiscard]] const std::vector<std::uint32_t>& values() const noexcept { return values_; }

  friend bool operator==(const SymbolicController&, const SymbolicController&) = default;

 private:
  std::size_t num_inputs_ = 0;
  std::vector<std::uint32_t> values_;
  InputSets enabled_;
};

/* Enables at x with 1 < level(x) < inf every u with Post_u(x) nonempty and
 * max level over Post_u(x) <= level(x) - 1. Throws IntegrityError when the
 * table was not produced by solve_pessimistic on (sys, target). */
[[nodiscard]] SymbolicController extract_controller(const FiniteSystem& sys,
                                                    const StateSet& target,
                                                    const EntryTimeTable& table);

struct SafeReachResult {
  SafetyController safety;
  FiniteSystem restricted;
  StateSet target;
  EntryTimeTable table;
  SymbolicController controller;
};

/* safety first (target cells absorbing, so the safe set only constrains the
 * run until it enters the target), then time-optimal reachability on the
 * restricted system towards target n safety domain */
[[nodiscard]] SafeReachResult synthesize_safe_reach(const FiniteSystem& sys, const StateSet& safe,
                                                    const StateSet& target);

}  // namespace symopt
