#include "symopt/refine.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "symopt/errors.hpp"

namespace symopt {

namespace {
constexpr StateIndex kNoCell = std::numeric_limits<StateIndex>::max();
}

RefinedController::RefinedController(const SymbolicController& controller,
                                     const Abstraction& abstraction, const FiniteSystem* system,
                                     InputPolicy policy)
    : controller_(&controller), abstraction_(&abstraction), system_(system), policy_(policy) {
  if (controller.num_states() != abstraction.quantizer.num_cells())
    throw IntegrityError("controller has " + std::to_string(controller.num_states()) +
                         " states but the grid has " +
                         std::to_string(abstraction.quantizer.num_cells()) + " cells");
  if (controller.num_inputs() != abstraction.inputs.size())
    throw IntegrityError("controller input count does not match the input grid");
  if (policy == InputPolicy::ValueGreedy) {
    if (system == nullptr)
      throw std::invalid_argument("value-greedy input selection needs the abstraction's transitions");
    if (system->num_states() != controller.num_states() ||
        system->num_inputs() != controller.num_inputs())
      throw IntegrityError("transition system does not match the controller");
  }
}

StateIndex RefinedController::cell_of(std::span<const double> x) const {
  const auto cells = abstraction_->quantizer.related(x);
  if (cells.empty()) {
    std::ostringstream msg;
    msg << "state (";
    for (std::size_t i = 0; i < x.size(); ++i) msg << (i ? ", " : "") << x[i];
    msg << ") lies outside the grid";
    throw OutOfDomainError(msg.str());
  }
  // on a shared face x is related to several cells; use the best one
  StateIndex best = cells.front();
  for (StateIndex c : cells)
    if (controller_->value(c) < controller_->value(best)) best = c;
  if (!controller_->in_domain(best))
    throw OutOfDomainError("cell " + std::to_string(best) + " is outside the winning set");
  return best;
}

std::vector<InputIndex> RefinedController::available_inputs(std::span<const double> x) const {
  return controller_->enabled(cell_of(x));
}

ControlDecision RefinedController::control_input(std::span<const double> x) const {
  ControlDecision d;
  d.cell = cell_of(x);
  d.value = controller_->value(d.cell);
  if (d.value == 0) {
    d.status = ControlDecision::Status::TargetReached;
    return d;
  }
  d.input = select_input(*controller_, system_, d.cell, policy_);
  d.u = abstraction_->inputs.point(d.input);
  return d;
}

InputIndex select_input(const SymbolicController& controller, const FiniteSystem* system,
                        StateIndex cell, InputPolicy policy) {
  const auto& enabled = controller.enabled(cell);
  if (enabled.empty())
    throw IntegrityError("cell " + std::to_string(cell) + " has no enabled inputs");
  if (policy == InputPolicy::FirstEnabled) return enabled.front();
  if (system == nullptr)
    throw std::invalid_argument("value-greedy input selection needs the transitions");
  InputIndex best_u = enabled.front();
  std::uint32_t best = kUnreachable;
  bool first = true;
  for (InputIndex u : enabled) {
    std::uint32_t worst = 0;
    for (StateIndex s : system->post(cell, u)) worst = std::max(worst, controller.value(s));
    if (first || worst < best) {
      best = worst;
      best_u = u;
      first = false;
    }
  }
  return best_u;
}

std::string to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::ReachedTarget:
      return "reached-target";
    case TerminationReason::LeftWinningSet:
      return "left-winning-set";
    case TerminationReason::StepLimit:
      return "step-limit";
  }
  return "unknown";
}

Trace simulate(const Model& model, const SampledFlow& flow, const RefinedController& controller,
               std::span<const double> x0, const TargetSpec& target, std::size_t max_steps) {
  const Quantizer& q = controller.abstraction().quantizer;
  if (x0.size() != model.state_dim())
    throw std::invalid_argument("initial state dimension does not match the model");
  Vector x(x0.begin(), x0.end());
  q.normalize(x);
  Rk4Integrator rk4(model);
  const SymbolicController& ctl = controller.controller();

  Trace trace;
  auto final_row = [&](TerminationReason reason) {
    TraceStep row;
    row.k = trace.steps.size();
    row.x = x;
    const auto cell = q.quantize(x);
    row.cell = cell ? *cell : kNoCell;
    row.value = cell ? ctl.value(*cell) : kUnreachable;
    trace.steps.push_back(std::move(row));
    trace.reason = reason;
    trace.achieved = trace.steps.size() - 1;
    return trace;
  };

  for (std::size_t k = 0;; ++k) {
    if (target.contains(x)) return final_row(TerminationReason::ReachedTarget);
    ControlDecision d;
    try {
      d = controller.control_input(x);
    } catch (const OutOfDomainError&) {
      return final_row(TerminationReason::LeftWinningSet);
    }
    if (d.status == ControlDecision::Status::TargetReached)
      return final_row(TerminationReason::ReachedTarget);
    if (k == max_steps) return final_row(TerminationReason::StepLimit);

    trace.steps.push_back(TraceStep{k, x, d.u, d.cell, d.value});
    rk4.step(flow, x, d.u);
    q.normalize(x);
  }
}

Certification certify(const Trace& trace, std::uint32_t lower, std::uint32_t upper) {
  Certification c;
  c.lower = lower;
  c.upper = upper;
  c.achieved = trace.achieved;
  c.reached = trace.reason == TerminationReason::ReachedTarget;
  return c;
}

}  // namespace symopt
