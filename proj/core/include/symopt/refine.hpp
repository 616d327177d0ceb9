#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symopt/abstraction.hpp"
#include "symopt/synthesis.hpp"

namespace symopt {

enum class InputPolicy {
  /* minimal worst-case successor value in the abstraction, then lowest index */
  ValueGreedy,
  /* lowest-index enabled input */
  FirstEnabled,
};

struct ControlDecision {
  enum class Status { Apply, TargetReached };
  Status status = Status::Apply;
  StateIndex cell = 0;
  std::uint32_t value = 0;
  InputIndex input = 0;
  Vector u;
};

/* input the policy picks among the enabled inputs of a winning cell with
 * positive value; system may be null for FirstEnabled */
[[nodiscard]] InputIndex select_input(const SymbolicController& controller, const FiniteSystem* system,
                                      StateIndex cell, InputPolicy policy);

/* class: RefinedController
 *
 * the symbolic controller lifted to concrete states through the relation:
 * a point uses the enabled inputs of a related cell, the one of least value
 * when it lies on a face shared by several
 *
 * holds references; the controller, abstraction and system must outlive it
 */
class RefinedController {
 public:
  /* system may be null for FirstEnabled; ValueGreedy needs it */
  RefinedController(const SymbolicController& controller, const Abstraction& abstraction,
                    const FiniteSystem* system, InputPolicy policy = InputPolicy::ValueGreedy);

  /* throws OutOfDomainError when x's cell is outside the winning set */
  [[nodiscard]] ControlDecision control_input(std::span<const double> x) const;

  /* inputs available at x: U_c(cell(x)) */
  [[nodiscard]] std::vector<InputIndex> available_inputs(std::span<const double> x) const;

  [[nodiscard]] InputPolicy policy() const noexcept { return policy_; }
  [[nodiscard]] const SymbolicController& controller() const noexcept { return *controller_; }
  [[nodiscard]] const Abstraction& abstraction() const noexcept { return *abstraction_; }

 private:
  [[nodiscard]] StateIndex cell_of(std::span<const double> x) const;

  const SymbolicController* controller_;
  const Abstraction* abstraction_;
  const FiniteSystem* system_;
  InputPolicy policy_;
};

enum class TerminationReason { ReachedTarget, LeftWinningSet, StepLimit };

[[nodiscard]] std::string to_string(TerminationReason reason);

struct TraceStep {
  std::size_t k = 0;
  Vector x;
  Vector u;  // empty on the final row
  StateIndex cell = 0;
  std::uint32_t value = kUnreachable;
};

/* struct: Trace
 *
 * closed-loop run: one step per applied input followed by the final state
 */
struct Trace {
  std::vector<TraceStep> steps;
  TerminationReason reason = TerminationReason::StepLimit;
  /* number of inputs applied; the entry time when the target was reached */
  std::size_t achieved = 0;
};

struct Certification {
  std::uint32_t lower = kUnreachable;
  std::uint32_t upper = kUnreachable;
  std::size_t achieved = 0;
  bool reached = false;
  [[nodiscard]] bool pass() const noexcept {
    return reached && lower != kUnreachable && upper != kUnreachable && lower <= achieved &&
           achieved <= upper;
  }
};

/* Runs the refined controller on the sampled plant from x0 until the state
 * enters W or its cell has value 0, the state leaves the winning set, or
 * max_steps inputs have been applied. Periodic coordinates are wrapped
 * after each step. */
[[nodiscard]] Trace simulate(const Model& model, const SampledFlow& flow,
                             const RefinedController& controller, std::span<const double> x0,
                             const TargetSpec& target, std::size_t max_steps);

/* checks lower <= achieved <= upper, with the bounds of the initial cell */
[[nodiscard]] Certification certify(const Trace& trace, std::uint32_t lower, std::uint32_t upper);

}  // namespace symopt
