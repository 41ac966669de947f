#include <benchmark/benchmark.h>

#include "mixtime/bottleneck.hpp"
#include "mixtime/examples.hpp"
#include "mixtime/mixing.hpp"

using namespace mixtime;

namespace {

Chain star2(int n) { return generate(ExampleSpec{Family::star2, n}).chain; }

void bm_stationary(benchmark::State& state) {
  ExampleSpec spec{Family::star2, static_cast<int>(state.range(0))};
  for (auto _ : state) {
    Chain chain = generate(spec).chain;
    benchmark::DoNotOptimize(chain.stationary().sum());
  }
}
BENCHMARK(bm_stationary)->Arg(16)->Arg(64)->Arg(256);

void bm_exit_frequencies(benchmark::State& state) {
  Chain chain = star2(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    ExitFrequencies ef = exit_frequencies(chain, chain.size() - 1);
    benchmark::DoNotOptimize(ef.expected_tau);
  }
}
BENCHMARK(bm_exit_frequencies)->Arg(16)->Arg(64)->Arg(256);

void bm_exit_solver_reuse(benchmark::State& state) {
  Chain chain = star2(static_cast<int>(state.range(0)));
  ExitFrequencySolver solver(chain);
  int s = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solver.solve(s).expected_tau);
    s = (s + 1) % chain.size();
  }
}
BENCHMARK(bm_exit_solver_reuse)->Arg(64)->Arg(256);

void bm_mixing_time(benchmark::State& state) {
  Chain chain = star2(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mixing_time(chain).t_mix);
  }
}
BENCHMARK(bm_mixing_time)->Arg(16)->Arg(64);

void bm_greedy_sequence(benchmark::State& state) {
  Chain chain = star2(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    BottleneckSequence seq = greedy_sequence(chain, chain.size() - 1, 0.5);
    benchmark::DoNotOptimize(sequence_score(chain, seq));
  }
}
BENCHMARK(bm_greedy_sequence)->Arg(16)->Arg(64)->Arg(256);

void bm_tree_max(benchmark::State& state) {
  Chain chain = star2(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_score_tree(chain).score);
  }
}
BENCHMARK(bm_tree_max)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
