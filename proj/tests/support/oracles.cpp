#include "oracles.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

namespace symopt::testing {

namespace {

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

FiniteSystem random_system(std::mt19937_64& rng, const RandomSystemOptions& opts) {
  const std::size_t n = uniform(rng, opts.min_states, opts.max_states);
  const std::size_t m = uniform(rng, 1, opts.max_inputs);
  FiniteSystemBuilder b(n, m);
  for (StateIndex x = 0; x < n; ++x)
    for (InputIndex u = 0; u < m; ++u) {
      if (!coin(rng, opts.density)) continue;
      const std::size_t k = opts.deterministic ? 1 : uniform(rng, 1, std::min(n, opts.max_branching));
      for (std::size_t i = 0; i < k; ++i)
        b.add_transition(x, u, static_cast<StateIndex>(uniform(rng, 0, n - 1)));
    }
  return b.build();
}

StateSet random_subset(std::mt19937_64& rng, std::size_t universe, double p) {
  StateSet s(universe);
  for (StateIndex x = 0; x < universe; ++x)
    if (coin(rng, p)) s.insert(x);
  return s;
}

std::vector<std::uint32_t> brute_force_min_max(const FiniteSystem& sys, const StateSet& target) {
  const std::size_t n = sys.num_states();
  // wins[k][x]: x can force W within k steps; k = n is enough (a winning
  // strategy never needs to revisit a layer)
  std::vector<std::vector<char>> wins(n + 1, std::vector<char>(n, 0));
  for (StateIndex x = 0; x < n; ++x) wins[0][x] = target.contains(x);
  for (std::size_t k = 1; k <= n; ++k)
    for (StateIndex x = 0; x < n; ++x) {
      bool w = target.contains(x);
      for (InputIndex u = 0; !w && u < sys.num_inputs(); ++u) {
        const auto post = sys.post(x, u);
        w = !post.empty() && std::all_of(post.begin(), post.end(), [&](StateIndex y) { return wins[k - 1][y]; });
      }
      wins[k][x] = w;
    }
  std::vector<std::uint32_t> out(n, kUnreachable);
  for (StateIndex x = 0; x < n; ++x)
    for (std::size_t k = 0; k <= n; ++k)
      if (wins[k][x]) {
        out[x] = static_cast<std::uint32_t>(k);
        break;
      }
  return out;
}

std::vector<std::uint32_t> brute_force_min_min(const FiniteSystem& sys, const StateSet& target) {
  const std::size_t n = sys.num_states();
  std::vector<std::uint32_t> out(n, kUnreachable);
  for (StateIndex start = 0; start < n; ++start) {
    std::vector<std::uint32_t> dist(n, kUnreachable);
    std::deque<StateIndex> queue{start};
    dist[start] = 0;
    while (!queue.empty()) {
      const StateIndex x = queue.front();
      queue.pop_front();
      if (target.contains(x)) {
        out[start] = dist[x];
        break;
      }
      for (InputIndex u = 0; u < sys.num_inputs(); ++u)
        for (StateIndex y : sys.post(x, u))
          if (dist[y] == kUnreachable) {
            dist[y] = dist[x] + 1;
            queue.push_back(y);
          }
    }
  }
  return out;
}

FiniteSystem determinize(const FiniteSystem& sys) {
  const std::size_t n = sys.num_states();
  FiniteSystemBuilder b(n, sys.num_inputs() * n);
  for (StateIndex x = 0; x < n; ++x)
    for (InputIndex u = 0; u < sys.num_inputs(); ++u)
      for (StateIndex y : sys.post(x, u)) b.add_transition(x, static_cast<InputIndex>(u * n + y), y);
  return b.build();
}

StateSet Aggregation::floor_of(const StateSet& w) const {
  StateSet out(num_blocks, true);
  for (StateIndex x = 0; x < block.size(); ++x)
    if (!w.contains(x)) out.erase(block[x]);
  return out;
}

StateSet Aggregation::ceil_of(const StateSet& w) const {
  StateSet out(num_blocks);
  for (StateIndex x : w.indices()) out.insert(block[x]);
  return out;
}

StateRelation Aggregation::abstract_to_concrete() const {
  StateRelation r;
  for (StateIndex x = 0; x < block.size(); ++x) r.emplace_back(block[x], x);
  return r;
}

StateRelation Aggregation::concrete_to_abstract() const {
  StateRelation r;
  for (StateIndex x = 0; x < block.size(); ++x) r.emplace_back(x, block[x]);
  return r;
}

Aggregation random_aggregation(std::mt19937_64& rng, std::size_t max_concrete, std::size_t max_blocks,
                               std::size_t max_inputs, bool deterministic) {
  Aggregation a;
  a.num_blocks = uniform(rng, 1, max_blocks);
  const std::size_t n = uniform(rng, a.num_blocks, max_concrete);
  const std::size_t m = uniform(rng, 1, max_inputs);

  a.block.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    a.block[i] = static_cast<StateIndex>(i < a.num_blocks ? i : uniform(rng, 0, a.num_blocks - 1));
  std::shuffle(a.block.begin(), a.block.end(), rng);

  std::vector<std::vector<bool>> enabled(a.num_blocks, std::vector<bool>(m));
  for (auto& row : enabled)
    for (std::size_t u = 0; u < m; ++u) row[u] = coin(rng, 0.7);

  FiniteSystemBuilder concrete(n, m);
  FiniteSystemBuilder abstract(a.num_blocks, m);
  for (StateIndex x = 0; x < n; ++x)
    for (InputIndex u = 0; u < m; ++u) {
      if (!enabled[a.block[x]][u]) continue;
      const std::size_t k = deterministic ? 1 : uniform(rng, 1, 3);
      for (std::size_t i = 0; i < k; ++i) {
        const auto y = static_cast<StateIndex>(uniform(rng, 0, n - 1));
        concrete.add_transition(x, u, y);
        abstract.add_transition(a.block[x], u, a.block[y]);
      }
    }
  a.concrete = concrete.build();
  a.abstract = abstract.build();
  return a;
}

Vector sample_box(std::mt19937_64& rng, const Box& box) {
  Vector x(box.dim());
  for (std::size_t i = 0; i < box.dim(); ++i)
    x[i] = std::uniform_real_distribution<double>(box.lo[i], box.hi[i])(rng);
  return x;
}

SoundnessReport monte_carlo_soundness(const Model& model, const Abstraction& abs, std::size_t samples,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SoundnessReport r;
  const std::size_t cells = abs.quantizer.num_cells();
  // draws pairs until `samples` enabled ones were checked
  while (r.checked < samples && r.samples < 1000 * samples) {
    ++r.samples;
    const auto c = static_cast<StateIndex>(uniform(rng, 0, cells - 1));
    const auto u = static_cast<InputIndex>(uniform(rng, 0, abs.inputs.size() - 1));
    const auto post = abs.system.post(c, u);
    if (post.empty()) continue;
    ++r.checked;
    Vector x = integrate(model, abs.flow, sample_box(rng, abs.quantizer.cell_box(c)), abs.inputs.point(u));
    abs.quantizer.normalize(x);
    const auto cell = abs.quantizer.quantize(x);
    if (!cell || !std::binary_search(post.begin(), post.end(), *cell)) ++r.violations;
  }
  return r;
}

}  // namespace symopt::testing
