#include <benchmark/benchmark.h>

#include <vector>

#include "tomocor/objective.hpp"
#include "tomocor/phantoms.hpp"
#include "tomocor/projector.hpp"
#include "tomocor/shift.hpp"

using namespace tomocor;

namespace {

struct Setup {
  Geometry geom;
  SystemMatrix L;
  Image w;
  Sinogram d;

  Setup(std::size_t n, std::size_t n_angles)
      : geom(build_geometry(n, n_angles)), L(build_system_matrix(geom)), w(make_shepp_logan(n)), d(forward(L, w)) {}
};

void BM_BuildSystemMatrix(benchmark::State& state) {
  const Geometry g = build_geometry(static_cast<std::size_t>(state.range(0)), 30);
  for (auto _ : state) benchmark::DoNotOptimize(build_system_matrix(g));
}
BENCHMARK(BM_BuildSystemMatrix)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Forward(benchmark::State& state) {
  const Setup s(static_cast<std::size_t>(state.range(0)), 30);
  for (auto _ : state) benchmark::DoNotOptimize(forward(s.L, s.w));
}
BENCHMARK(BM_Forward)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_Adjoint(benchmark::State& state) {
  const Setup s(static_cast<std::size_t>(state.range(0)), 30);
  for (auto _ : state) benchmark::DoNotOptimize(adjoint(s.L, s.d));
}
BENCHMARK(BM_Adjoint)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_TranslateRow(benchmark::State& state) {
  const Geometry g = build_geometry(static_cast<std::size_t>(state.range(0)), 1);
  const RowTranslator t(g.n_beamlets, g.spacing, default_sigma());
  std::vector<double> row(g.n_beamlets, 1.0), out(g.n_beamlets);
  for (auto _ : state) {
    t.translate(row, 1.3, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_TranslateRow)->Arg(128)->Arg(512);

void BM_ImplicitEvaluate(benchmark::State& state) {
  const Setup s(static_cast<std::size_t>(state.range(0)), 30);
  const ImplicitObjective obj(s.L, s.d, s.geom, default_sigma());
  std::vector<double> x(obj.dimension(), 0.0);
  std::copy(s.w.values().begin(), s.w.values().end(), x.begin());
  for (auto _ : state) benchmark::DoNotOptimize(obj.evaluate(x));
}
BENCHMARK(BM_ImplicitEvaluate)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
