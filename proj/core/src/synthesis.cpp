#include "symopt/synthesis.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "symopt/errors.hpp"

namespace symopt {

namespace {

void check_universe(const FiniteSystem& sys, const StateSet& s, const char* what) {
  if (s.universe() != sys.num_states())
    throw std::invalid_argument(std::string(what) + " has universe " + std::to_string(s.universe()) +
                                " but the system has " + std::to_string(sys.num_states()) +
                                " states");
}

}  // namespace

StateSet apply_gw(const FiniteSystem& sys, const StateSet& target, const StateSet& z,
                  SolveMode mode) {
  check_universe(sys, target, "target set");
  check_universe(sys, z, "argument set");
  StateSet out = target;
  const std::size_t m = sys.num_inputs();
  for (std::size_t x = 0; x < sys.num_states(); ++x) {
    if (out.contains(static_cast<StateIndex>(x))) continue;
    for (std::size_t u = 0; u < m; ++u) {
      const auto post = sys.pair_post(x * m + u);
      if (post.empty()) continue;
      const bool fits =
          mode == SolveMode::Pessimistic
              ? std::all_of(post.begin(), post.end(), [&](StateIndex s) { return z.contains(s); })
              : std::any_of(post.begin(), post.end(), [&](StateIndex s) { return z.contains(s); });
      if (fits) {
        out.insert(static_cast<StateIndex>(x));
        break;
      }
    }
  }
  return out;
}

EntryTimeTable::EntryTimeTable(SolveMode mode, std::vector<std::uint32_t> levels,
                               std::size_t iterations)
    : mode_(mode), levels_(std::move(levels)), iterations_(iterations) {}

std::uint32_t EntryTimeTable::entry_time(StateIndex x) const {
  const std::uint32_t l = level(x);
  return l == kUnreachable ? kUnreachable : l - 1;
}

StateSet EntryTimeTable::winning_set() const {
  StateSet z(levels_.size());
  for (std::size_t x = 0; x < levels_.size(); ++x)
    if (levels_[x] != kUnreachable) z.insert(static_cast<StateIndex>(x));
  return z;
}

/* Breadth-layered evaluation of the least fixed point. A pair (x, u) fires
 * once all (pessimistic) or any (optimistic) of its successors carry a
 * level; x then takes the level of the layer being expanded plus one. */
EntryTimeTable solve(const FiniteSystem& sys, const StateSet& target, SolveMode mode) {
  check_universe(sys, target, "target set");
  const std::size_t n = sys.num_states();
  const std::size_t m = sys.num_inputs();
  std::vector<std::uint32_t> levels(n, kUnreachable);
  std::vector<StateIndex> frontier = target.indices();
  for (StateIndex x : frontier) levels[x] = 1;
  if (frontier.empty()) return EntryTimeTable(mode, std::move(levels), 0);

  const Predecessors preds(sys);
  std::vector<std::uint32_t> remaining;
  if (mode == SolveMode::Pessimistic) {
    remaining.resize(sys.num_pairs());
    for (std::size_t p = 0; p < sys.num_pairs(); ++p)
      remaining[p] = static_cast<std::uint32_t>(sys.pair_post(p).size());
  }

  std::uint32_t level = 1;
  std::vector<StateIndex> next;
  while (!frontier.empty()) {
    next.clear();
    for (StateIndex reached : frontier) {
      for (std::uint64_t p : preds.of(reached)) {
        const auto x = static_cast<StateIndex>(p / m);
        if (mode == SolveMode::Pessimistic && --remaining[p] != 0) continue;
        if (levels[x] == kUnreachable) {
          levels[x] = level + 1;
          next.push_back(x);
        }
      }
    }
    if (next.empty()) break;
    ++level;
    frontier.swap(next);
  }
  return EntryTimeTable(mode, std::move(levels), level);
}

EntryTimeTable solve_pessimistic(const FiniteSystem& sys, const StateSet& target) {
  return solve(sys, target, SolveMode::Pessimistic);
}

EntryTimeTable solve_optimistic(const FiniteSystem& sys, const StateSet& target) {
  return solve(sys, target, SolveMode::Optimistic);
}

SafetyController solve_safety(const FiniteSystem& sys, const StateSet& safe) {
  return solve_safety(sys, safe, StateSet(sys.num_states()));
}

SafetyController solve_safety(const FiniteSystem& sys, const StateSet& safe,
                              const StateSet& absorbing) {
  check_universe(sys, safe, "safe set");
  check_universe(sys, absorbing, "absorbing set");
  const std::size_t n = sys.num_states();
  const std::size_t m = sys.num_inputs();
  std::vector<char> in_z(n, 0);
  for (StateIndex x : safe.indices()) in_z[x] = 1;
  std::vector<char> sink(n, 0);
  for (StateIndex x : absorbing.indices()) sink[x] = in_z[x];

  std::vector<char> bad(sys.num_pairs(), 0);
  std::vector<std::uint32_t> good(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t u = 0; u < m; ++u) {
      const std::size_t p = x * m + u;
      const auto post = sys.pair_post(p);
      if (post.empty()) {
        bad[p] = 1;
        continue;
      }
      bad[p] = std::any_of(post.begin(), post.end(), [&](StateIndex s) { return !in_z[s]; });
      if (!bad[p]) ++good[x];
    }
  }

  std::vector<StateIndex> removed;
  for (std::size_t x = 0; x < n; ++x)
    if (in_z[x] && !sink[x] && good[x] == 0) {
      in_z[x] = 0;
      removed.push_back(static_cast<StateIndex>(x));
    }
  const Predecessors preds(sys);
  while (!removed.empty()) {
    const StateIndex gone = removed.back();
    removed.pop_back();
    for (std::uint64_t p : preds.of(gone)) {
      if (bad[p]) continue;
      bad[p] = 1;
      const auto x = static_cast<StateIndex>(p / m);
      if (--good[x] == 0 && in_z[x] && !sink[x]) {
        in_z[x] = 0;
        removed.push_back(x);
      }
    }
  }

  SafetyController result{InputSets(n), StateSet(n)};
  for (std::size_t x = 0; x < n; ++x) {
    if (!in_z[x]) continue;
    result.domain.insert(static_cast<StateIndex>(x));
    for (std::size_t u = 0; u < m; ++u)
      if (!bad[x * m + u]) result.allowed[x].push_back(static_cast<InputIndex>(u));
  }
  return result;
}

SymbolicController::SymbolicController(std::size_t num_states, std::size_t num_inputs,
                                       std::vector<std::uint32_t> values, InputSets enabled)
    : num_inputs_(num_inputs), values_(std::move(values)), enabled_(std::move(enabled)) {
  if (values_.size() != num_states || enabled_.size() != num_states)
    throw std::invalid_argument("controller tables do not match the state count");
  for (std::size_t x = 0; x < num_states; ++x) {
    const auto& e = enabled_[x];
    if (!std::is_sorted(e.begin(), e.end()) || std::adjacent_find(e.begin(), e.end()) != e.end())
      throw std::invalid_argument("enabled inputs of state " + std::to_string(x) +
                                  " are not sorted and unique");
    if (!e.empty() && e.back() >= num_inputs)
      throw IndexError("enabled input out of range at state " + std::to_string(x));
    if (values_[x] == kUnreachable && !e.empty())
      throw std::invalid_argument("state " + std::to_string(x) +
                                  " outside the winning set enables inputs");
  }
}

StateSet SymbolicController::winning_set() const {
  StateSet z(values_.size());
  for (std::size_t x = 0; x < values_.size(); ++x)
    if (values_[x] != kUnreachable) z.insert(static_cast<StateIndex>(x));
  return z;
}

SymbolicController extract_controller(const FiniteSystem& sys, const StateSet& target,
                                      const EntryTimeTable& table) {
  check_universe(sys, target, "target set");
  if (table.size() != sys.num_states())
    throw IntegrityError("entry time table has " + std::to_string(table.size()) +
                         " entries for a system with " + std::to_string(sys.num_states()) +
                         " states");
  if (table.mode() != SolveMode::Pessimistic)
    throw IntegrityError("controllers are only extracted from pessimistic tables");

  const std::size_t n = sys.num_states();
  const std::size_t m = sys.num_inputs();
  std::vector<std::uint32_t> values(n, kUnreachable);
  InputSets enabled(n);
  for (std::size_t xi = 0; xi < n; ++xi) {
    const auto x = static_cast<StateIndex>(xi);
    const std::uint32_t l = table.level(x);
    if ((l == 1) != target.contains(x))
      throw IntegrityError("level of state " + std::to_string(x) + " disagrees with the target set");
    // best worst-case successor level over the enabled inputs
    std::uint32_t best = kUnreachable;
    for (std::size_t u = 0; u < m; ++u) {
      const auto post = sys.pair_post(xi * m + u);
      if (post.empty()) continue;
      std::uint32_t worst = 0;
      for (StateIndex s : post) worst = std::max(worst, table.level(s));
      best = std::min(best, worst);
      if (l != kUnreachable && l > 1 && worst <= l - 1) enabled[xi].push_back(static_cast<InputIndex>(u));
    }
    if (l == 1) {
      values[xi] = 0;
      continue;
    }
    const std::uint32_t expected = saturating_add(best, 1);
    if (l != expected)
      throw IntegrityError("level of state " + std::to_string(x) +
                           " is not a fixed point of the pessimistic operator");
    if (l != kUnreachable) values[xi] = l - 1;
  }
  return SymbolicController(n, m, std::move(values), std::move(enabled));
}

SafeReachResult synthesize_safe_reach(const FiniteSystem& sys, const StateSet& safe,
                                      const StateSet& target) {
  check_universe(sys, safe, "safe set");
  check_universe(sys, target, "target set");
  SafeReachResult r;
  r.safety = solve_safety(sys, safe, target & safe);
  r.restricted = restrict(sys, r.safety.allowed);
  r.target = target & r.safety.domain;
  r.table = solve_pessimistic(r.restricted, r.target);
  r.controller = extract_controller(r.restricted, r.target, r.table);
  return r;
}

}  // namespace symopt
