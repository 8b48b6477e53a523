#include "lgkit/algebroid.hpp"
#include "lgkit/builtins.hpp"
#include "lgkit/nmetric.hpp"

#include <benchmark/benchmark.h>

using namespace lgkit;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) == 0 ? Exec::serial : Exec::parallel; }

void label(benchmark::State& s) { s.SetLabel(s.range(0) == 0 ? "serial" : "openmp"); }

void BM_Axioms(benchmark::State& s) {
  const auto g = builtins::so3_space();
  for (auto _ : s) benchmark::DoNotOptimize(check_axioms(g, 200, 1e-10, 1, exec_of(s)));
  label(s);
}

void BM_GaugeMetricVerify(benchmark::State& s) {
  const auto g = builtins::so2_plane(64);
  const NMetric two = build_proper_action_2metric(g);
  for (auto _ : s) benchmark::DoNotOptimize(verify_n_metric(g, two, 16, 1e-6, 1, exec_of(s)));
  label(s);
}

void BM_Leibniz(benchmark::State& s) {
  const auto g = builtins::so3_space();
  const ActionAlgebroidSection a{"a", [](const Vec& x) {
    Vec c(3);
    c << x(0), 1.0, x(1) * x(2);
    return c;
  }};
  const auto pts = sample_ball(3, 2000, 1.0, 1);
  for (auto _ : s) {
    benchmark::DoNotOptimize(
        leibniz_check(g, a, a, [](const Vec& x) { return std::exp(x(0)); }, pts, 1e-4, exec_of(s)));
  }
  label(s);
}

}  // namespace

BENCHMARK(BM_Axioms)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GaugeMetricVerify)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Leibniz)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
