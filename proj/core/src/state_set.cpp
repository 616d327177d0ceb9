#include "symopt/state_set.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace symopt {

namespace {
constexpr std::size_t kWordBits = 64;

std::size_t word_count(std::size_t universe) { return (universe + kWordBits - 1) / kWordBits; }
}  // namespace

StateSet::StateSet(std::size_t universe, bool full)
    : universe_(universe), words_(word_count(universe), full ? ~std::uint64_t{0} : 0) {
  clear_padding();
}

StateSet StateSet::from_indices(std::size_t universe, std::span<const StateIndex> members) {
  StateSet s(universe);
  for (StateIndex x : members) s.insert(x);
  return s;
}

std::size_t StateSet::count() const noexcept {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool StateSet::contains(StateIndex x) const {
  if (x >= universe_)
    throw std::out_of_range("state " + std::to_string(x) + " outside set universe " +
                            std::to_string(universe_));
  return (words_[x / kWordBits] >> (x % kWordBits)) & 1U;
}

void StateSet::insert(StateIndex x) {
  if (x >= universe_)
    throw std::out_of_range("state " + std::to_string(x) + " outside set universe " +
                            std::to_string(universe_));
  words_[x / kWordBits] |= std::uint64_t{1} << (x % kWordBits);
}

void StateSet::erase(StateIndex x) {
  if (x >= universe_)
    throw std::out_of_range("state " + std::to_string(x) + " outside set universe " +
                            std::to_string(universe_));
  words_[x / kWordBits] &= ~(std::uint64_t{1} << (x % kWordBits));
}

StateSet& StateSet::operator|=(const StateSet& other) {
  check_same_universe(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

StateSet& StateSet::operator&=(const StateSet& other) {
  check_same_universe(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

StateSet& StateSet::operator-=(const StateSet& other) {
  check_same_universe(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
  return *this;
}

StateSet StateSet::complement() const {
  StateSet c = *this;
  for (auto& w : c.words_) w = ~w;
  c.clear_padding();
  return c;
}

bool StateSet::is_subset_of(const StateSet& other) const {
  check_same_universe(other);
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (words_[i] & ~other.words_[i]) return false;
  return true;
}

std::vector<StateIndex> StateSet::indices() const {
  std::vector<StateIndex> out;
  out.reserve(count());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    std::uint64_t w = words_[i];
    while (w) {
      const int bit = std::countr_zero(w);
      out.push_back(static_cast<StateIndex>(i * kWordBits + static_cast<std::size_t>(bit)));
      w &= w - 1;
    }
  }
  return out;
}

void StateSet::check_same_universe(const StateSet& other) const {
  if (universe_ != other.universe_)
    throw std::invalid_argument("state sets over different universes (" +
                                std::to_string(universe_) + " vs " +
                                std::to_string(other.universe_) + ")");
}

void StateSet::clear_padding() noexcept {
  const std::size_t tail = universe_ % kWordBits;
  if (tail != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << tail) - 1;
}

}  // namespace symopt
