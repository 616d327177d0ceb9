#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "symopt/errors.hpp"
#include "symopt/refine.hpp"

using namespace symopt;

namespace {

// the branching system on the 1-D grid {0, 1, 2} with inputs {0, 1}
struct Embedded {
  Model model;
  Abstraction abs;
  StateSet target;
  SymbolicController controller;
};

Embedded embedded_branching() {
  Model m("still", 1, 1, [](std::span<const double>, std::span<const double>, std::span<double> dx) { dx[0] = 0; },
          LinearGrowth{Eigen::MatrixXd::Zero(1, 1)});
  GridSpec g;
  g.tau = 1;
  g.eta = 1;
  g.mu = 1;
  g.domain = {{0}, {2}};
  g.input_box = {{0}, {1}};
  FiniteSystem sys = FiniteSystemBuilder(3, 2)
                         .add_transition(0, 0, 1)
                         .add_transition(0, 0, 2)
                         .add_transition(0, 1, 1)
                         .add_transition(1, 0, 2)
                         .build();
  Abstraction abs = attach_system(m, g, SampledFlow{1, 1}, std::move(sys));
  StateSet w = StateSet::from_indices(3, std::vector<StateIndex>{2});
  SymbolicController c = extract_controller(abs.system, w, solve_pessimistic(abs.system, w));
  return {std::move(m), std::move(abs), std::move(w), std::move(c)};
}

struct DoubleIntegratorCase {
  Model model = double_integrator();
  Abstraction abs;
  TargetSpec w;
  EntryTimeTable lower;
  SymbolicController controller;

  DoubleIntegratorCase() {
    GridSpec g;
    g.tau = 1;
    g.eta = 0.3;
    g.mu = 0.1;
    g.domain = {{-8, -8}, {8, 8}};
    g.input_box = {{-1}, {1}};
    abs = build_abstraction(model, g, 2);
    const Vector origin{0, 0};
    w = TargetSpec::ball(origin, 1.0);
    const StateSet under = target_under(abs.quantizer, w);
    controller = extract_controller(abs.system, under, solve_pessimistic(abs.system, under));
    lower = solve_optimistic(abs.system, target_over(abs.quantizer, w));
  }
};

const DoubleIntegratorCase& di_case() {
  static const DoubleIntegratorCase c;
  return c;
}

}  // namespace

TEST(SelectInput, BranchingTieBreaksToLowestIndex) {
  const Embedded e = embedded_branching();
  // both inputs have worst-case successor value 1
  EXPECT_EQ(select_input(e.controller, &e.abs.system, 0, InputPolicy::ValueGreedy), 0u);
  EXPECT_EQ(select_input(e.controller, nullptr, 0, InputPolicy::FirstEnabled), 0u);
  EXPECT_THROW((void)select_input(e.controller, nullptr, 0, InputPolicy::ValueGreedy), std::invalid_argument);
  EXPECT_THROW((void)select_input(e.controller, &e.abs.system, 2, InputPolicy::ValueGreedy), IntegrityError);
}

TEST(SelectInput, PrefersTheSmallerWorstCase) {
  // 0 -a-> {1, 2}, 0 -b-> {2} with both enabled: b's worst case is the
  // target itself
  const FiniteSystem s = FiniteSystemBuilder(3, 2)
                             .add_transition(0, 0, 1)
                             .add_transition(0, 0, 2)
                             .add_transition(0, 1, 2)
                             .add_transition(1, 0, 2)
                             .build();
  const SymbolicController c(3, 2, {1, 1, 0}, InputSets{{0, 1}, {0}, {}});
  EXPECT_EQ(select_input(c, &s, 0, InputPolicy::ValueGreedy), 1u);
  EXPECT_EQ(select_input(c, &s, 0, InputPolicy::FirstEnabled), 0u);
}

TEST(RefinedController, EmbeddedBranching) {
  const Embedded e = embedded_branching();
  const RefinedController rc(e.controller, e.abs, &e.abs.system);
  const ControlDecision d = rc.control_input(Vector{0.0});
  EXPECT_EQ(d.status, ControlDecision::Status::Apply);
  EXPECT_EQ(d.cell, 0u);
  EXPECT_EQ(d.input, 0u);
  EXPECT_EQ(d.u, (Vector{0.0}));
  EXPECT_EQ(rc.available_inputs(Vector{0.2}), (std::vector<InputIndex>{0, 1}));
  // cell 1 has a single enabled input
  EXPECT_EQ(rc.control_input(Vector{1.0}).input, 0u);
  // W cell: nothing to apply
  EXPECT_EQ(rc.control_input(Vector{2.0}).status, ControlDecision::Status::TargetReached);
  // on the face between cells 0 and 1 the cell of lower value is used
  EXPECT_EQ(rc.control_input(Vector{0.5}).cell, 1u);
  EXPECT_THROW((void)rc.control_input(Vector{5.0}), OutOfDomainError);
}

TEST(RefinedController, OutsideTheWinningSet) {
  Embedded e = embedded_branching();
  const SymbolicController only_target(3, 2, {kUnreachable, kUnreachable, 0}, InputSets(3));
  const RefinedController rc(only_target, e.abs, &e.abs.system);
  EXPECT_THROW((void)rc.control_input(Vector{0.0}), OutOfDomainError);
  EXPECT_EQ(rc.control_input(Vector{2.0}).status, ControlDecision::Status::TargetReached);
}

TEST(RefinedController, MismatchedPiecesAreRejected) {
  const Embedded e = embedded_branching();
  const SymbolicController wrong(4, 2, {0, 0, 0, 0}, InputSets(4));
  EXPECT_THROW(RefinedController(wrong, e.abs, &e.abs.system), IntegrityError);
  EXPECT_THROW(RefinedController(e.controller, e.abs, nullptr, InputPolicy::ValueGreedy), std::invalid_argument);
  EXPECT_NO_THROW(RefinedController(e.controller, e.abs, nullptr, InputPolicy::FirstEnabled));
}

TEST(RefinedController, SingleEnabledInputAtACenter) {
  const auto& c = di_case();
  const RefinedController rc(c.controller, c.abs, &c.abs.system);
  bool found = false;
  for (StateIndex x = 0; x < c.controller.num_states() && !found; ++x) {
    if (c.controller.value(x) == 0 || !c.controller.in_domain(x) || c.controller.enabled(x).size() != 1) continue;
    found = true;
    const ControlDecision d = rc.control_input(c.abs.quantizer.center(x));
    EXPECT_EQ(d.cell, x);
    EXPECT_EQ(d.input, c.controller.enabled(x).front());
  }
  EXPECT_TRUE(found);
}

TEST(Simulate, StartInsideTheTarget) {
  const auto& c = di_case();
  const RefinedController rc(c.controller, c.abs, &c.abs.system);
  const Trace t = simulate(c.model, c.abs.flow, rc, Vector{0.2, -0.1}, c.w, 100);
  EXPECT_EQ(t.reason, TerminationReason::ReachedTarget);
  EXPECT_EQ(t.achieved, 0u);
  ASSERT_EQ(t.steps.size(), 1u);
  EXPECT_TRUE(t.steps[0].u.empty());
}

TEST(Simulate, FromThreeZero) {
  const auto& c = di_case();
  const RefinedController rc(c.controller, c.abs, &c.abs.system);
  const Trace t = simulate(c.model, c.abs.flow, rc, Vector{3, 0}, c.w, 100);
  EXPECT_EQ(t.reason, TerminationReason::ReachedTarget);
  EXPECT_EQ(t.achieved, 3u);
  const Certification cert = certify(t, c.lower.entry_time(t.steps[0].cell), c.controller.value(t.steps[0].cell));
  EXPECT_TRUE(cert.pass());
}

TEST(Simulate, StepLimit) {
  const auto& c = di_case();
  const RefinedController rc(c.controller, c.abs, &c.abs.system);
  const Trace t = simulate(c.model, c.abs.flow, rc, Vector{3, 0}, c.w, 1);
  EXPECT_EQ(t.reason, TerminationReason::StepLimit);
  EXPECT_EQ(t.achieved, 1u);
  EXPECT_FALSE(certify(t, 0, 10).pass());
}

TEST(Simulate, LeavingTheWinningSetIsReported) {
  const auto& c = di_case();
  const RefinedController rc(c.controller, c.abs, &c.abs.system);
  // far corner: far outside the winning set
  const Trace t = simulate(c.model, c.abs.flow, rc, Vector{7.9, 7.9}, c.w, 100);
  EXPECT_EQ(t.reason, TerminationReason::LeftWinningSet);
  EXPECT_EQ(to_string(t.reason), "left-winning-set");
}

TEST(Certify, Inequalities) {
  Trace t;
  t.reason = TerminationReason::ReachedTarget;
  t.achieved = 5;
  EXPECT_TRUE(certify(t, 5, 5).pass());
  EXPECT_FALSE(certify(t, 6, 9).pass());
  EXPECT_FALSE(certify(t, 1, 4).pass());
  EXPECT_FALSE(certify(t, kUnreachable, kUnreachable).pass());
}

// random starts in the winning set, both policies: the run reaches W with
// strictly decreasing cell values, within [lower, upper] of its first cell,
// and consecutive states follow the sampled flow
TEST(RefineProperty, CertifiedClosedLoop) {
  const auto& c = di_case();
  std::mt19937_64 rng(67);
  const auto winning = c.controller.winning_set().indices();
  for (InputPolicy policy : {InputPolicy::ValueGreedy, InputPolicy::FirstEnabled}) {
    const RefinedController rc(c.controller, c.abs, &c.abs.system, policy);
    for (int trial = 0; trial < 300; ++trial) {
      const StateIndex cell = winning[rng() % winning.size()];
      const Vector x0 = symopt::testing::sample_box(rng, c.abs.quantizer.cell_box(cell));
      const Trace t = simulate(c.model, c.abs.flow, rc, x0, c.w, 500);
      ASSERT_EQ(t.reason, TerminationReason::ReachedTarget);
      const StateIndex first = t.steps.front().cell;
      ASSERT_LE(t.achieved, c.controller.value(first));
      ASSERT_GE(t.achieved, c.lower.entry_time(first));
      for (std::size_t k = 0; k + 1 < t.steps.size(); ++k) {
        const Vector next = integrate(c.model, c.abs.flow, t.steps[k].x, t.steps[k].u);
        for (std::size_t i = 0; i < next.size(); ++i) ASSERT_NEAR(next[i], t.steps[k + 1].x[i], 1e-9);
        if (k + 2 < t.steps.size()) ASSERT_LT(t.steps[k + 1].value, t.steps[k].value);
      }
    }
  }
}
