#include <benchmark/benchmark.h>

#include "moebius/curves.hpp"
#include "moebius/energies.hpp"
#include "moebius/inscription.hpp"
#include "moebius/optimize.hpp"
#include "moebius/polygon.hpp"

namespace {

using namespace moebius;

const ArcLengthCurve& trefoil() {
  static const ArcLengthCurve c = arclength_reparametrize(ParametricCurve::torus_knot(2, 3, 2.0, 1.0));
  return c;
}

void BM_DiscreteEnergy(benchmark::State& state) {
  const ClosedPolygon p = random_equilateral_polygon(static_cast<std::size_t>(state.range(0)), 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(discrete_moebius_energy(p).value);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DiscreteEnergy)->RangeMultiplier(4)->Range(16, 4096)->Complexity(benchmark::oNSquared);

void BM_MinimumDistanceEnergy(benchmark::State& state) {
  const ClosedPolygon p = random_equilateral_polygon(static_cast<std::size_t>(state.range(0)), 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(minimum_distance_energy(p).value);
}
BENCHMARK(BM_MinimumDistanceEnergy)->RangeMultiplier(4)->Range(16, 1024);

void BM_EnergyGradient(benchmark::State& state) {
  const ClosedPolygon p = random_equilateral_polygon(static_cast<std::size_t>(state.range(0)), 3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(energy_gradient(p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EnergyGradient)->RangeMultiplier(4)->Range(16, 1024)->Complexity(benchmark::oNSquared);

void BM_TangentGradient(benchmark::State& state) {
  const ClosedPolygon p = random_equilateral_polygon(static_cast<std::size_t>(state.range(0)), 3, 3);
  const std::vector<Vec3> g = energy_gradient(p);
  for (auto _ : state) benchmark::DoNotOptimize(tangent_gradient(p, g));
}
BENCHMARK(BM_TangentGradient)->RangeMultiplier(4)->Range(16, 1024);

void BM_SmoothEnergy(benchmark::State& state) {
  const double tol = state.range(0) == 0 ? 1e-6 : 1e-8;
  for (auto _ : state) benchmark::DoNotOptimize(smooth_moebius_energy(trefoil(), tol).value);
}
BENCHMARK(BM_SmoothEnergy)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ArcLengthTable(benchmark::State& state) {
  const ParametricCurve c = ParametricCurve::torus_knot(2, 3, 2.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(arclength_reparametrize(c).length());
}
BENCHMARK(BM_ArcLengthTable)->Unit(benchmark::kMillisecond);

void BM_EquilateralInscription(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(inscribe_equilateral(trefoil(), n, 1e-10).chord);
}
BENCHMARK(BM_EquilateralInscription)->RangeMultiplier(4)->Range(16, 1024)->Unit(benchmark::kMillisecond);

void BM_DescentStep(benchmark::State& state) {
  const ClosedPolygon p = random_equilateral_polygon(static_cast<std::size_t>(state.range(0)), 3, 4);
  OptimizerConfig cfg;
  cfg.max_iterations = 10;
  for (auto _ : state) benchmark::DoNotOptimize(minimize_discrete_energy(p, cfg).final_energy);
}
BENCHMARK(BM_DescentStep)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
