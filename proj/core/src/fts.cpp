#include "symopt/fts.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "symopt/errors.hpp"

namespace symopt {

FiniteSystem::FiniteSystem(std::size_t num_states, std::size_t num_inputs, StateSet initial,
                           std::vector<std::uint64_t> offsets, std::vector<StateIndex> targets)
    : num_states_(num_states),
      num_inputs_(num_inputs),
      initial_(std::move(initial)),
      offsets_(std::move(offsets)),
      targets_(std::move(targets)) {
  if (initial_.universe() != num_states_)
    throw std::invalid_argument("initial set universe does not match state count");
  if (offsets_.size() != num_states_ * num_inputs_ + 1)
    throw std::invalid_argument("offset table has " + std::to_string(offsets_.size()) +
                                " entries, expected " +
                                std::to_string(num_states_ * num_inputs_ + 1));
  if (offsets_.front() != 0 || offsets_.back() != targets_.size())
    throw std::invalid_argument("offset table does not span the successor array");
  for (std::size_t p = 0; p + 1 < offsets_.size(); ++p) {
    if (offsets_[p] > offsets_[p + 1]) throw std::invalid_argument("offset table not monotone");
    for (std::uint64_t i = offsets_[p]; i < offsets_[p + 1]; ++i) {
      if (targets_[i] >= num_states_)
        throw std::invalid_argument("successor " + std::to_string(targets_[i]) +
                                    " out of range");
      if (i > offsets_[p] && targets_[i - 1] >= targets_[i])
        throw std::invalid_argument("successor list of pair " + std::to_string(p) +
                                    " is not sorted and duplicate free");
    }
  }
}

void FiniteSystem::check_state(StateIndex x) const {
  if (x >= num_states_)
    throw IndexError("state index " + std::to_string(x) + " out of range (num_states=" +
                     std::to_string(num_states_) + ")");
}

void FiniteSystem::check_input(InputIndex u) const {
  if (u >= num_inputs_)
    throw IndexError("input index " + std::to_string(u) + " out of range (num_inputs=" +
                     std::to_string(num_inputs_) + ")");
}

std::span<const StateIndex> FiniteSystem::post(StateIndex x, InputIndex u) const {
  check_state(x);
  check_input(u);
  return pair_post(std::size_t{x} * num_inputs_ + u);
}

std::vector<InputIndex> FiniteSystem::enabled_inputs(StateIndex x) const {
  check_state(x);
  std::vector<InputIndex> out;
  const std::size_t base = std::size_t{x} * num_inputs_;
  for (std::size_t u = 0; u < num_inputs_; ++u)
    if (offsets_[base + u] != offsets_[base + u + 1]) out.push_back(static_cast<InputIndex>(u));
  return out;
}

bool FiniteSystem::is_enabled(StateIndex x, InputIndex u) const { return !post(x, u).empty(); }

std::size_t FiniteSystem::num_enabled_pairs() const noexcept {
  std::size_t n = 0;
  for (std::size_t p = 0; p + 1 < offsets_.size(); ++p) n += offsets_[p] != offsets_[p + 1];
  return n;
}

FiniteSystemBuilder::FiniteSystemBuilder(std::size_t num_states, std::size_t num_inputs)
    : num_states_(num_states), num_inputs_(num_inputs), initial_(num_states, true) {}

FiniteSystemBuilder& FiniteSystemBuilder::add_transition(StateIndex x, InputIndex u,
                                                         StateIndex x_next) {
  if (x >= num_states_ || x_next >= num_states_)
    throw IndexError("transition " + std::to_string(x) + " -> " + std::to_string(x_next) +
                     " references a state out of range");
  if (u >= num_inputs_) throw IndexError("input index " + std::to_string(u) + " out of range");
  edges_[{x, u}].push_back(x_next);
  return *this;
}

FiniteSystemBuilder& FiniteSystemBuilder::set_initial(StateSet initial) {
  if (initial.universe() != num_states_)
    throw std::invalid_argument("initial set universe does not match state count");
  initial_ = std::move(initial);
  return *this;
}

FiniteSystem FiniteSystemBuilder::build() const {
  std::vector<std::uint64_t> offsets(num_states_ * num_inputs_ + 1, 0);
  std::vector<StateIndex> targets;
  auto it = edges_.begin();
  for (std::size_t x = 0; x < num_states_; ++x) {
    for (std::size_t u = 0; u < num_inputs_; ++u) {
      const std::size_t p = x * num_inputs_ + u;
      if (it != edges_.end() && it->first.first == x && it->first.second == u) {
        std::vector<StateIndex> succ = it->second;
        std::sort(succ.begin(), succ.end());
        succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
        targets.insert(targets.end(), succ.begin(), succ.end());
        ++it;
      }
      offsets[p + 1] = targets.size();
    }
  }
  return FiniteSystem(num_states_, num_inputs_, initial_, std::move(offsets), std::move(targets));
}

FiniteSystem restrict(const FiniteSystem& sys, const InputSets& allowed) {
  if (allowed.size() != sys.num_states())
    throw std::invalid_argument("allowed-input map has " + std::to_string(allowed.size()) +
                                " entries for " + std::to_string(sys.num_states()) + " states");
  const std::size_t m = sys.num_inputs();
  std::vector<std::uint64_t> offsets(sys.num_pairs() + 1, 0);
  std::vector<StateIndex> targets;
  std::vector<char> keep(m);
  for (std::size_t x = 0; x < sys.num_states(); ++x) {
    std::fill(keep.begin(), keep.end(), 0);
    for (InputIndex u : allowed[x]) {
      if (u >= m) throw IndexError("allowed input " + std::to_string(u) + " out of range");
      keep[u] = 1;
    }
    for (std::size_t u = 0; u < m; ++u) {
      const std::size_t p = x * m + u;
      if (keep[u]) {
        auto succ = sys.pair_post(p);
        targets.insert(targets.end(), succ.begin(), succ.end());
      }
      offsets[p + 1] = targets.size();
    }
  }
  return FiniteSystem(sys.num_states(), m, sys.initial(), std::move(offsets), std::move(targets));
}

InputSets all_enabled_inputs(const FiniteSystem& sys) {
  InputSets out(sys.num_states());
  for (std::size_t x = 0; x < sys.num_states(); ++x)
    out[x] = sys.enabled_inputs(static_cast<StateIndex>(x));
  return out;
}

Predecessors::Predecessors(const FiniteSystem& sys) : offsets_(sys.num_states() + 1, 0) {
  const auto& targets = sys.targets();
  for (StateIndex t : targets) ++offsets_[t + 1];
  for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
  pairs_.resize(targets.size());
  std::vector<std::uint64_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t p = 0; p < sys.num_pairs(); ++p)
    for (StateIndex t : sys.pair_post(p)) pairs_[cursor[t]++] = p;
}

namespace {

using RelationMap = std::vector<std::vector<StateIndex>>;

RelationMap image_map(std::size_t num_a, std::size_t num_b, const StateRelation& relation) {
  RelationMap image(num_a);
  for (auto [a, b] : relation) {
    if (a >= num_a || b >= num_b) throw IndexError("relation pair references a missing state");
    image[a].push_back(b);
  }
  for (auto& v : image) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return image;
}

bool related(const RelationMap& image, StateIndex a, StateIndex b) {
  return std::binary_search(image[a].begin(), image[a].end(), b);
}

bool initial_condition(const FiniteSystem& a, const FiniteSystem& b, const RelationMap& image) {
  for (StateIndex xa : a.initial().indices()) {
    bool found = false;
    for (StateIndex xb : image[xa]) found = found || b.initial().contains(xb);
    if (!found) return false;
  }
  return true;
}

}  // namespace

bool is_simulation_relation(const FiniteSystem& a, const FiniteSystem& b,
                            const StateRelation& relation) {
  const RelationMap image = image_map(a.num_states(), b.num_states(), relation);
  if (!initial_condition(a, b, image)) return false;
  for (auto [xa, xb] : relation) {
    for (InputIndex ua = 0; ua < a.num_inputs(); ++ua) {
      for (StateIndex xa_next : a.post(xa, ua)) {
        bool matched = false;
        for (InputIndex ub = 0; ub < b.num_inputs() && !matched; ++ub)
          for (StateIndex xb_next : b.post(xb, ub))
            if (related(image, xa_next, xb_next)) {
              matched = true;
              break;
            }
        if (!matched) return false;
      }
    }
  }
  return true;
}

bool is_alternating_simulation_relation(const FiniteSystem& a, const FiniteSystem& b,
                                        const StateRelation& relation) {
  const RelationMap image = image_map(a.num_states(), b.num_states(), relation);
  if (!initial_condition(a, b, image)) return false;
  for (auto [xa, xb] : relation) {
    for (InputIndex ua : a.enabled_inputs(xa)) {
      const auto post_a = a.post(xa, ua);
      bool answered = false;
      for (InputIndex ub : b.enabled_inputs(xb)) {
        bool all_matched = true;
        for (StateIndex xb_next : b.post(xb, ub)) {
          bool some = false;
          for (StateIndex xa_next : post_a) some = some || related(image, xa_next, xb_next);
          if (!some) {
            all_matched = false;
            break;
          }
        }
        if (all_matched) {
          answered = true;
          break;
        }
      }
      if (!answered) return false;
    }
  }
  return true;
}

}  // namespace symopt
