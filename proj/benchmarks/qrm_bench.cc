// Cycle counts go out as counters; wall time is the toolchain's own cost.
#include <benchmark/benchmark.h>

#include <random>

#include "driver.h"
#include "qrm/corpus.h"
#include "qrm/pipeline.h"

using namespace qrm;

namespace {

std::string qmux(int n, int len) {
  return corpus::qmux_source(std::vector<corpus::GateList>(size_t{1} << n, corpus::uniform_gate_list(len, 1)));
}

ImageConfig big() {
  ImageConfig c;
  c.n_qram = 1u << 20;
  return c;
}

void BM_Compile(benchmark::State& st) {
  const std::string src = qmux(static_cast<int>(st.range(0)), 4);
  for (auto _ : st) benchmark::DoNotOptimize(compile(src, big()));
}
BENCHMARK(BM_Compile)->DenseRange(1, 6);

// T_exe against n at fixed block length, plus the sequential baseline
void BM_PartialEval(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0)), len = static_cast<int>(st.range(1));
  auto c = compile(qmux(n, len), big());
  EvalResult r;
  for (auto _ : st) r = evaluate(c.image, {{"n", static_cast<Word>(n)}});
  auto row = driver::bench_qmux(n, len);
  st.counters["T_exe"] = static_cast<double>(r.t_exe);
  st.counters["baseline"] = static_cast<double>(row.baseline);
  st.counters["nodes"] = r.table.size();
}
BENCHMARK(BM_PartialEval)->ArgsProduct({{2, 3, 4, 5, 6}, {4, 8, 16}});

// Full simulation with every coin in superposition
void BM_Simulate(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  std::mt19937_64 rng(7);
  auto c = compile(corpus::qmux_source(corpus::random_gate_lists(1 << n, 8, 2, rng)));
  auto r = evaluate(c.image, {{"n", static_cast<Word>(n)}});
  Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(Eigen::Index{1} << r.qvars.size()).normalized();
  Execution ex;
  for (auto _ : st) ex = execute(c.image, {{"n", static_cast<Word>(n)}}, psi);
  st.counters["cycles"] = static_cast<double>(ex.costs.cycles);
  st.counters["ops_per_cycle"] = static_cast<double>(ex.costs.max_ops_per_cycle);
}
BENCHMARK(BM_Simulate)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_GhzSimulate(benchmark::State& st) {
  auto c = compile(corpus::ghz_source());
  for (auto _ : st) benchmark::DoNotOptimize(execute(c.image, {{"n", static_cast<Word>(st.range(0))}}));
}
BENCHMARK(BM_GhzSimulate)->RangeMultiplier(2)->Range(2, 16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
