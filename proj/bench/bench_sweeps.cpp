// Serial reference against the OpenMP sweep for the verifier and planner.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "deleg/oracle.hpp"
#include "deleg/planner.hpp"
#include "deleg/spec_format.hpp"
#include "deleg/verifier.hpp"

using namespace deleg;

namespace {

VerifyParams exhaustive(std::size_t depth) {
  VerifyParams p;
  p.invariant = Invariant::ActiveConnectivity;
  p.mode = VerifyMode::Exhaustive;
  p.n = 3;
  p.depth = depth;
  return p;
}

VerifyParams sampled(std::size_t samples) {
  VerifyParams p;
  p.invariant = Invariant::ActiveConnectivity;
  p.mode = VerifyMode::Random;
  p.n = 6;
  p.depth = 8;
  p.samples = samples;
  p.seed = 1;
  return p;
}

template <InvariantReport (*Verify)(const VerifyParams&)>
void BM_VerifyExhaustive(benchmark::State& state) {
  auto params = exhaustive(static_cast<std::size_t>(state.range(0)));
  std::size_t steps = 0;
  for (auto _ : state) {
    auto r = Verify(params);
    steps += r.steps_checked;
    benchmark::DoNotOptimize(r.holds);
  }
  state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}

template <InvariantReport (*Verify)(const VerifyParams&)>
void BM_VerifyRandom(benchmark::State& state) {
  auto params = sampled(static_cast<std::size_t>(state.range(0)));
  std::size_t steps = 0;
  for (auto _ : state) {
    auto r = Verify(params);
    steps += r.steps_checked;
    benchmark::DoNotOptimize(r.holds);
  }
  state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}

template <std::vector<PlanResult> (*Plan)(const AuthorizationState&, const std::string&, const Goal&)>
void BM_Plan(benchmark::State& state) {
  auto s = random_reachable_state(3, static_cast<std::size_t>(state.range(0)), 12).state;
  auto goal = parse_goal("access(A)");
  for (auto _ : state) {
    auto results = Plan(s, "A", goal);
    benchmark::DoNotOptimize(results.size());
  }
}

}  // namespace

BENCHMARK(BM_VerifyExhaustive<verify_step_invariant_serial>)->Name("verify_exhaustive/serial")->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyExhaustive<verify_step_invariant>)->Name("verify_exhaustive/parallel")->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyRandom<verify_step_invariant_serial>)->Name("verify_random/serial")->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyRandom<verify_step_invariant>)->Name("verify_random/parallel")->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Plan<plan_serial>)->Name("plan/serial")->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Plan<plan>)->Name("plan/parallel")->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
