#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "symopt/state_set.hpp"

namespace symopt {

/* per-state input sets, indexed by state; each entry sorted ascending */
using InputSets = std::vector<std::vector<InputIndex>>;

/* class: FiniteSystem
 *
 * nondeterministic finite transition system S = (X, X0, U, ->, X, 1_X)
 *
 * transitions are kept in compressed row form over the (state, input)
 * pairs: the successors of pair p = x*num_inputs + u are
 * targets_[offsets_[p] .. offsets_[p+1]). An input u is disabled at x
 * exactly when that range is empty, so a present successor list is never
 * empty. Successor lists are sorted and duplicate free.
 *
 * the object is immutable after construction
 */
class FiniteSystem {
 public:
  FiniteSystem() = default;

  /* validates the compressed layout; throws std::invalid_argument on
   * unsorted/duplicate successors, out-of-range indices, or bad offsets */
  FiniteSystem(std::size_t num_states, std::size_t num_inputs, StateSet initial,
               std::vector<std::uint64_t> offsets, std::vector<StateIndex> targets);

  [[nodiscard]] std::size_t num_states() const noexcept { return num_states_; }
  [[nodiscard]] std::size_t num_inputs() const noexcept { return num_inputs_; }
  [[nodiscard]] const StateSet& initial() const noexcept { return initial_; }

  /* Post_u(x); empty when u is disabled at x. Throws IndexError. */
  [[nodiscard]] std::span<const StateIndex> post(StateIndex x, InputIndex u) const;
  /* U(x) in ascending order. Throws IndexError. */
  [[nodiscard]] std::vector<InputIndex> enabled_inputs(StateIndex x) const;
  [[nodiscard]] bool is_enabled(StateIndex x, InputIndex u) const;

  /* number of (x, u, x') triples */
  [[nodiscard]] std::size_t num_transitions() const noexcept { return targets_.size(); }
  /* number of (x, u) pairs with u enabled at x */
  [[nodiscard]] std::size_t num_enabled_pairs() const noexcept;

  /* unchecked pair access used by the solvers */
  [[nodiscard]] std::span<const StateIndex> pair_post(std::size_t pair) const noexcept {
    return {targets_.data() + offsets_[pair], targets_.data() + offsets_[pair + 1]};
  }
  [[nodiscard]] std::size_t num_pairs() const noexcept { return num_states_ * num_inputs_; }

  [[nodiscard]] const std::vector<std::uint64_t>& offsets() const noexcept { return offsets_; }
  [[nodiscard]] const std::vector<StateIndex>& targets() const noexcept { return targets_; }

  friend bool operator==(const FiniteSystem& a, const FiniteSystem& b) = default;

 private:
  void check_state(StateIndex x) const;
  void check_input(InputIndex u) const;

  std::size_t num_states_ = 0;
  std::size_t num_inputs_ = 0;
  StateSet initial_;
  std::vector<std::uint64_t> offsets_{0};
  std::vector<StateIndex> targets_;
};

/* incremental construction of a FiniteSystem; transitions may be added in
 * any order and duplicates are merged. All states are initial unless
 * set_initial is called. */
class FiniteSystemBuilder {
 public:
  FiniteSystemBuilder(std::size_t num_states, std::size_t num_inputs);

  FiniteSystemBuilder& add_transition(StateIndex x, InputIndex u, StateIndex x_next);
  FiniteSystemBuilder& set_initial(StateSet initial);

  [[nodiscard]] FiniteSystem build() const;

 private:
  std::size_t num_states_;
  std::size_t num_inputs_;
  StateSet initial_;
  std::map<std::pair<StateIndex, InputIndex>, std::vector<StateIndex>> edges_;
};

/* keeps (x, u, .) iff u is in allowed[x] and enabled at x; the initial set is
 * unchanged. allowed must have one entry per state. */
[[nodiscard]] FiniteSystem restrict(const FiniteSystem& sys, const InputSets& allowed);

/* every enabled input at every state */
[[nodiscard]] InputSets all_enabled_inputs(const FiniteSystem& sys);

/* reverse adjacency: for each state x', the (x, u) pair ids p = x*M + u with
 * x' in Post_u(x). Pair ids of one state are ascending. */
class Predecessors {
 public:
  explicit Predecessors(const FiniteSystem& sys);

  [[nodiscard]] std::span<const std::uint64_t> of(StateIndex x) const noexcept {
    return {pairs_.data() + offsets_[x], pairs_.data() + offsets_[x + 1]};
  }

 private:
  std::vector<std::uint64_t> offsets_;
  std::vector<std::uint64_t> pairs_;
};

/* Relation between the states of two finite systems, stored as a list of
 * (a, b) pairs. Used to check the exact (epsilon = 0) simulation notions on
 * explicitly given systems. */
using StateRelation = std::vector<std::pair<StateIndex, StateIndex>>;

/* R is a simulation relation from a to b: related initial states, and every
 * a-transition is matched by some b-transition into a related pair. Inputs
 * of a and b are matched freely. */
[[nodiscard]] bool is_simulation_relation(const FiniteSystem& a, const FiniteSystem& b,
                                          const StateRelation& relation);

/* R is an alternating simulation relation from a to b: for every related
 * pair and every u_a in U_a(x_a) some u_b in U_b(x_b) has all its successors
 * related to some u_a-successor of x_a. */
[[nodiscard]] bool is_alternating_simulation_relation(const FiniteSystem& a,
                                                      const FiniteSystem& b,
                                                      const StateRelation& relation);

}  // namespace symopt
