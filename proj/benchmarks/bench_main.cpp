#include <benchmark/benchmark.h>

#include <random>

#include "symopt/abstraction.hpp"
#include "symopt/synthesis.hpp"

using namespace symopt;

namespace {

GridSpec double_integrator_grid(double half_width) {
  GridSpec g;
  g.tau = 1;
  g.eta = 0.3;
  g.mu = 0.1;
  g.domain = {{-half_width, -half_width}, {half_width, half_width}};
  g.input_box = {{-1}, {1}};
  return g;
}

const Abstraction& cached_abstraction() {
  static const Abstraction abs = build_abstraction(double_integrator(), double_integrator_grid(30), 1);
  return abs;
}

StateSet origin_ball(const Abstraction& abs) {
  const Vector origin{0, 0};
  return target_under(abs.quantizer, TargetSpec::ball(origin, 1.0));
}

}  // namespace

// abstraction of the double integrator on B_r, one thread
static void BM_BuildAbstraction(benchmark::State& state) {
  const Model m = double_integrator();
  const GridSpec g = double_integrator_grid(static_cast<double>(state.range(0)));
  std::size_t transitions = 0;
  for (auto _ : state) {
    const Abstraction abs = build_abstraction(m, g, 1);
    transitions = abs.system.num_transitions();
    benchmark::DoNotOptimize(transitions);
  }
  state.counters["transitions"] = static_cast<double>(transitions);
}
BENCHMARK(BM_BuildAbstraction)->Arg(5)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_SolvePessimistic(benchmark::State& state) {
  const Abstraction& abs = cached_abstraction();
  const StateSet w = origin_ball(abs);
  for (auto _ : state) benchmark::DoNotOptimize(solve_pessimistic(abs.system, w));
}
BENCHMARK(BM_SolvePessimistic)->Unit(benchmark::kMillisecond);

static void BM_SolveOptimistic(benchmark::State& state) {
  const Abstraction& abs = cached_abstraction();
  const StateSet w = target_over(abs.quantizer, TargetSpec::ball(Vector{0, 0}, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_optimistic(abs.system, w));
}
BENCHMARK(BM_SolveOptimistic)->Unit(benchmark::kMillisecond);

static void BM_ExtractController(benchmark::State& state) {
  const Abstraction& abs = cached_abstraction();
  const StateSet w = origin_ball(abs);
  const EntryTimeTable table = solve_pessimistic(abs.system, w);
  for (auto _ : state) benchmark::DoNotOptimize(extract_controller(abs.system, w, table));
}
BENCHMARK(BM_ExtractController)->Unit(benchmark::kMillisecond);

// random sparse systems, the solver alone
static void BM_SolveRandom(benchmark::State& state) {
  const auto n = static_cast<StateIndex>(state.range(0));
  std::mt19937_64 rng(5);
  FiniteSystemBuilder b(n, 4);
  std::uniform_int_distribution<StateIndex> pick(0, n - 1);
  for (StateIndex x = 0; x < n; ++x)
    for (InputIndex u = 0; u < 4; ++u)
      for (int k = 0; k < 3; ++k) b.add_transition(x, u, pick(rng));
  const FiniteSystem sys = b.build();
  StateSet w(n);
  for (StateIndex x = 0; x < n; x += 97) w.insert(x);
  for (auto _ : state) benchmark::DoNotOptimize(solve_pessimistic(sys, w));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sys.num_transitions()));
}
BENCHMARK(BM_SolveRandom)->Arg(1 << 12)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
