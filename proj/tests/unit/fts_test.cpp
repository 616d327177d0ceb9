#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "symopt/errors.hpp"
#include "symopt/fts.hpp"

using namespace symopt;

namespace {

constexpr InputIndex a = 0, b = 1;

FiniteSystem chain() {
  return FiniteSystemBuilder(3, 1).add_transition(0, a, 1).add_transition(1, a, 2).build();
}

FiniteSystem branching() {
  return FiniteSystemBuilder(3, 2)
      .add_transition(0, a, 1)
      .add_transition(0, a, 2)
      .add_transition(0, b, 1)
      .add_transition(1, a, 2)
      .build();
}

std::vector<StateIndex> vec(std::span<const StateIndex> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(FiniteSystem, PostReadsBackTransitions) {
  const FiniteSystem c = chain();
  EXPECT_EQ(vec(c.post(0, a)), (std::vector<StateIndex>{1}));
  EXPECT_TRUE(c.post(2, a).empty());
  const FiniteSystem br = FiniteSystemBuilder(3, 1).add_transition(0, a, 2).add_transition(0, a, 1).build();
  EXPECT_EQ(vec(br.post(0, a)), (std::vector<StateIndex>{1, 2}));
}

TEST(FiniteSystem, PostRangeErrors) {
  const FiniteSystem c = chain();
  EXPECT_THROW((void)c.post(3, a), IndexError);
  EXPECT_THROW((void)c.post(0, 1), IndexError);
  EXPECT_THROW((void)c.enabled_inputs(3), IndexError);
}

TEST(FiniteSystem, EnabledInputs) {
  EXPECT_TRUE(chain().enabled_inputs(2).empty());
  const FiniteSystem br = FiniteSystemBuilder(3, 2).add_transition(0, a, 1).add_transition(0, a, 2).build();
  EXPECT_EQ(br.enabled_inputs(0), (std::vector<InputIndex>{a}));
  EXPECT_EQ(branching().enabled_inputs(0), (std::vector<InputIndex>{a, b}));
}

TEST(FiniteSystem, BuilderMergesDuplicatesAndDefaultsToAllInitial) {
  const FiniteSystem s = FiniteSystemBuilder(2, 1).add_transition(0, 0, 1).add_transition(0, 0, 1).build();
  EXPECT_EQ(s.num_transitions(), 1u);
  EXPECT_EQ(s.initial().count(), 2u);
}

TEST(FiniteSystem, ConstructorValidatesLayout) {
  // unsorted successors
  EXPECT_THROW(FiniteSystem(2, 1, StateSet(2), {0, 2, 2}, {1, 0}), std::invalid_argument);
  // duplicate successors
  EXPECT_THROW(FiniteSystem(2, 1, StateSet(2), {0, 2, 2}, {1, 1}), std::invalid_argument);
  // successor out of range
  EXPECT_THROW(FiniteSystem(2, 1, StateSet(2), {0, 1, 1}, {2}), std::invalid_argument);
  // offsets of the wrong length
  EXPECT_THROW(FiniteSystem(2, 1, StateSet(2), {0, 1}, {1}), std::invalid_argument);
  // initial set over another universe
  EXPECT_THROW(FiniteSystem(2, 1, StateSet(3), {0, 1, 1}, {1}), std::invalid_argument);
  EXPECT_NO_THROW(FiniteSystem(2, 1, StateSet(2), {0, 1, 1}, {1}));
}

TEST(Restrict, FullInputSetIsIdentity) {
  const FiniteSystem s = branching();
  EXPECT_EQ(restrict(s, all_enabled_inputs(s)), s);
  EXPECT_EQ(restrict(s, InputSets(3, {a, b})), s);
}

TEST(Restrict, KeepsOnlyAllowedInputs) {
  const FiniteSystem r = restrict(branching(), InputSets{{b}, {}, {}});
  EXPECT_EQ(r.num_transitions(), 1u);
  EXPECT_EQ(vec(r.post(0, b)), (std::vector<StateIndex>{1}));
  EXPECT_TRUE(r.post(0, a).empty());
  EXPECT_TRUE(r.post(1, a).empty());
}

TEST(Restrict, EmptyAllowedRemovesEverything) {
  const FiniteSystem s = branching();
  const FiniteSystem r = restrict(s, InputSets(3));
  EXPECT_EQ(r.num_transitions(), 0u);
  EXPECT_EQ(r.initial(), s.initial());
}

TEST(Restrict, WrongSizeThrows) { EXPECT_ANY_THROW((void)restrict(branching(), InputSets(2))); }

// restrict never adds transitions and post/enabled_inputs agree
TEST(FiniteSystemProperty, RestrictIsSubsetAndEnabledMatchesPost) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const FiniteSystem s = symopt::testing::random_system(rng, {.max_states = 15, .max_inputs = 4, .density = 0.6});
    InputSets allowed(s.num_states());
    for (auto& in : allowed)
      for (InputIndex u = 0; u < s.num_inputs(); ++u)
        if (rng() % 2) in.push_back(u);
    const FiniteSystem r = restrict(s, allowed);
    for (StateIndex x = 0; x < s.num_states(); ++x) {
      const auto en = s.enabled_inputs(x);
      for (InputIndex u = 0; u < s.num_inputs(); ++u) {
        ASSERT_EQ(std::find(en.begin(), en.end(), u) != en.end(), !s.post(x, u).empty());
        ASSERT_EQ(s.is_enabled(x, u), !s.post(x, u).empty());
        const bool kept = std::find(allowed[x].begin(), allowed[x].end(), u) != allowed[x].end();
        if (kept)
          ASSERT_EQ(vec(r.post(x, u)), vec(s.post(x, u)));
        else
          ASSERT_TRUE(r.post(x, u).empty());
      }
    }
  }
}

TEST(Predecessors, InvertsPost) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const FiniteSystem s = symopt::testing::random_system(rng, {});
    const Predecessors pre(s);
    std::size_t total = 0;
    for (StateIndex y = 0; y < s.num_states(); ++y)
      for (std::uint64_t p : pre.of(y)) {
        const auto post = s.pair_post(p);
        ASSERT_TRUE(std::binary_search(post.begin(), post.end(), y));
        ++total;
      }
    ASSERT_EQ(total, s.num_transitions());
  }
}

TEST(SimulationRelations, AggregationRealizesBoth) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto agg = symopt::testing::random_aggregation(rng, 30, 8, 3, trial % 2 == 0);
    EXPECT_TRUE(is_alternating_simulation_relation(agg.abstract, agg.concrete, agg.abstract_to_concrete()));
    EXPECT_TRUE(is_simulation_relation(agg.concrete, agg.abstract, agg.concrete_to_abstract()));
  }
}

TEST(SimulationRelations, DetectsMissingTransition) {
  // b lacks the 0 -> 1 move of a
  const FiniteSystem sa = FiniteSystemBuilder(2, 1).add_transition(0, 0, 1).build();
  const FiniteSystem sb = FiniteSystemBuilder(2, 1).add_transition(0, 0, 0).build();
  EXPECT_FALSE(is_simulation_relation(sa, sb, {{0, 0}, {1, 1}}));
  EXPECT_TRUE(is_simulation_relation(sa, sb, {{0, 0}, {1, 0}}));
}
