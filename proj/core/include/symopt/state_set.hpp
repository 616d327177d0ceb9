#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace symopt {

using StateIndex = std::uint32_t;
using InputIndex = std::uint32_t;

/* class: StateSet
 *
 * dense bitset over the states 0..universe-1 of a finite system
 *
 * all binary operations require both operands to share the same universe
 * and throw std::invalid_argument otherwise
 */
class StateSet {
 public:
  StateSet() = default;
  explicit StateSet(std::size_t universe, bool full = false);

  static StateSet from_indices(std::size_t universe, std::span<const StateIndex> members);

  [[nodiscard]] std::size_t universe() const noexcept { return universe_; }
  [[nodiscard]] std::size_t count() const noexcept;
  [[nodiscard]] bool empty() const noexcept { return count() == 0; }

  /* throws std::out_of_range when x >= universe */
  [[nodiscard]] bool contains(StateIndex x) const;
  void insert(StateIndex x);
  void erase(StateIndex x);

  StateSet& operator|=(const StateSet& other);
  StateSet& operator&=(const StateSet& other);
  /* set difference */
  StateSet& operator-=(const StateSet& other);

  [[nodiscard]] StateSet complement() const;
  [[nodiscard]] bool is_subset_of(const StateSet& other) const;

  /* members in ascending order */
  [[nodiscard]] std::vector<StateIndex> indices() const;

  friend bool operator==(const StateSet& a, const StateSet& b) = default;

 private:
  void check_same_universe(const StateSet& other) const;
  void clear_padding() noexcept;

  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

inline StateSet operator|(StateSet a, const StateSet& b) { return a |= b; }
inline StateSet operator&(StateSet a, const StateSet& b) { return a &= b; }
inline StateSet operator-(StateSet a, const StateSet& b) { return a -= b; }

}  // namespace symopt
