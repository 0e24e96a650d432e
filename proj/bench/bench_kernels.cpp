// Serial reference against the OpenMP kernels on the hot loops: boundary
// evaluation, the 2-D cell quadrature and a P2 property batch.

#include <benchmark/benchmark.h>

#include <vector>

#include "squaremap/functional.hpp"
#include "squaremap/geometry.hpp"
#include "squaremap/kernels.hpp"
#include "squaremap/uniformize.hpp"

using namespace squaremap;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::parallel : Exec::serial; }

laurent::NormalizedMap octic_competitor() {
  laurent::Pole p;
  p.location = {0.0, 0.0};
  for (int m = 1; m <= 8; ++m) p.coefficients.emplace_back(0.01 / m, -0.004 * m);
  return laurent::NormalizedMap::multipole({p});
}

void BM_EvaluateBoundary(benchmark::State& state) {
  const auto f = octic_competitor();
  const auto curve = geometry::discretize_boundary(geometry::Disk{{0, 0}, 1.0}, 1e4, 64, 0);
  std::vector<Complex> out(curve.samples.size());
  for (auto _ : state) {
    kernels::evaluate_points(f, curve.samples, out, exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(out.size()));
}
BENCHMARK(BM_EvaluateBoundary)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_ExteriorSquareBoundary(benchmark::State& state) {
  const auto f = laurent::NormalizedMap::exterior_square();
  const auto curve = geometry::discretize_boundary(geometry::Disk{{0, 0}, 1.0}, 1e3, 64, 0);
  const auto pts = geometry::evaluation_points(curve);
  std::vector<Complex> out(pts.size());
  for (auto _ : state) {
    kernels::evaluate_points(f, pts, out, exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_ExteriorSquareBoundary)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_IntegrateCells(benchmark::State& state) {
  const auto f = octic_competitor();
  std::vector<kernels::Cell> cells;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j)
      cells.push_back({1.0 + i * 0.1, 1.1 + i * 0.1, 1.0 + j * 0.1, 1.1 + j * 0.1});
  std::vector<double> out(cells.size());
  auto integrand = [&](Complex z) { return std::norm(laurent::derivative(f, z)) - 1.0; };
  for (auto _ : state) {
    kernels::integrate_cells(integrand, cells, 11, out, exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_IntegrateCells)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_PropertyBatch(benchmark::State& state) {
  const geometry::Domain d({geometry::AxisSquare{{0, 0}, 1.0}});
  uniformize::PropertyOptions opt;
  opt.exec = exec_of(state);
  for (auto _ : state) {
    auto rep = uniformize::verify_extremal(d, 32, 0.1, 3, opt);
    benchmark::DoNotOptimize(rep.min);
  }
}
BENCHMARK(BM_PropertyBatch)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
