// Serial vs OpenMP timings for the parallel kernels.

#include <benchmark/benchmark.h>

#include "dg2pix/analytics.hpp"
#include "dg2pix/embed.hpp"
#include "dg2pix/synth.hpp"

using namespace dg2pix;

namespace {

const SbmDataset& data() {
  static const SbmDataset d = sbm_dynamic(desk_sbm_config(1));
  return d;
}

const MultiscaleHierarchy& hierarchy() {
  static const MultiscaleHierarchy h = build_hierarchy(data().graph);
  return h;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

void BM_Hierarchy(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_hierarchy(data().graph, exec_of(state)));
}

void BM_HierarchyReference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_hierarchy_reference(data().graph));
}

void BM_WlDocuments(benchmark::State& state) {
  const auto graphs = flatten(hierarchy());
  for (auto _ : state) benchmark::DoNotOptimize(wl_documents(graphs, 2, false, exec_of(state)));
}

void BM_Fgsd(benchmark::State& state) {
  const auto graphs = flatten(hierarchy());
  FgsdParams p;
  p.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(fgsd(graphs, p));
}

void BM_DistanceMatrix(benchmark::State& state) {
  const auto m = fgsd(hierarchy());
  std::vector<std::span<const double>> cols;
  for (const auto& r : m.rows) cols.emplace_back(r.normalized);
  for (auto _ : state) benchmark::DoNotOptimize(cosine_distance_matrix(cols, exec_of(state)));
}

void BM_Layout(benchmark::State& state) {
  const auto& global = hierarchy().at({hierarchy().top_level(), 0});
  LayoutParams p;
  p.iterations = 100;
  p.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(fr_layout(global, p));
}

}  // namespace

BENCHMARK(BM_Hierarchy)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HierarchyReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WlDocuments)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Fgsd)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DistanceMatrix)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Layout)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
