#include "anisocap/flow.hpp"
#include "anisocap/generators.hpp"
#include "anisocap/stability.hpp"

#include <benchmark/benchmark.h>

using namespace anisocap;

namespace {

void BM_eval_with_derivatives(benchmark::State& state) {
  const auto ell = Anisotropy::ellipsoidal(Vec3(4, 1, 1).asDiagonal().toDenseMatrix());
  const auto pts = fibonacci_sphere(1000);
  for (auto _ : state) {
    for (const auto& z : pts) benchmark::DoNotOptimize(ell.eval_with_derivatives(z));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(pts.size()));
}
BENCHMARK(BM_eval_with_derivatives);

void BM_build_truncated_wulff(benchmark::State& state) {
  const auto ell = Anisotropy::ellipsoidal(Vec3(4, 1, 1).asDiagonal().toDenseMatrix());
  const auto cfg = make_config(ell, 0.3, 4000);
  const int res = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_truncated_wulff(ell, cfg, res));
}
BENCHMARK(BM_build_truncated_wulff)->Arg(10)->Arg(20)->Arg(40);

void BM_compute_state(benchmark::State& state) {
  const auto ell = Anisotropy::ellipsoidal(Vec3(4, 1, 1).asDiagonal().toDenseMatrix());
  const auto cfg = make_config(ell, 0.3, 4000);
  const auto mesh = build_truncated_wulff(ell, cfg, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_state(mesh, ell, cfg));
  state.SetItemsProcessed(state.iterations() * mesh.vertex_count());
}
BENCHMARK(BM_compute_state)->Arg(10)->Arg(20)->Arg(40);

void BM_assemble(benchmark::State& state) {
  const auto iso = Anisotropy::isotropic();
  const auto cfg = make_config(iso, 0.3);
  const auto mesh = build_truncated_wulff(iso, cfg, static_cast<int>(state.range(0)));
  const auto st = compute_state(mesh, iso, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(mesh, st, iso, cfg));
}
BENCHMARK(BM_assemble)->Arg(10)->Arg(20);

void BM_spectrum(benchmark::State& state) {
  const auto iso = Anisotropy::isotropic();
  const auto cfg = make_config(iso, 0.3);
  const auto mesh = build_truncated_wulff(iso, cfg, static_cast<int>(state.range(0)));
  const auto st = compute_state(mesh, iso, cfg);
  const auto form = assemble(mesh, st, iso, cfg);
  for (auto _ : state)
    benchmark::DoNotOptimize(spectrum(form, 4, ConstraintMode::MeanZero));
}
BENCHMARK(BM_spectrum)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_flow_step(benchmark::State& state) {
  const auto iso = Anisotropy::isotropic();
  const auto cfg = make_config(iso, 0.3);
  const auto mesh = perturb_normals(build_truncated_wulff(iso, cfg, 20), 0.03, 0);
  FlowConfig fc;
  for (auto _ : state) {
    double step = fc.step;
    benchmark::DoNotOptimize(flow_step(mesh, iso, cfg, fc, step));
  }
}
BENCHMARK(BM_flow_step);

}  // namespace

BENCHMARK_MAIN();
