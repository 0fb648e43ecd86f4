#include <vprisk/dyson.hpp>
#include <vprisk/empirical.hpp>
#include <vprisk/equivalents.hpp>
#include <vprisk/profiles.hpp>

#include <benchmark/benchmark.h>

using namespace vprisk;

namespace {

VarianceProfile bench_profile(benchmark::State& state) {
  const Index n = state.range(0);
  return normalize(make_polynomial(n, n * 3 / 2, 0.1));
}

void BM_DysonSolve(benchmark::State& state) {
  const VarianceProfile g = bench_profile(state);
  for (auto _ : state) benchmark::DoNotOptimize(solve_dyson(g, 0.5).T.data());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DysonSolve)->RangeMultiplier(2)->Range(100, 1600)->Complexity();

void BM_DysonDerivative(benchmark::State& state) {
  const VarianceProfile g = bench_profile(state);
  const DysonSolution s = solve_dyson(g, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(solve_dyson_derivative(g, 0.5, s).T_prime.data());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DysonDerivative)->RangeMultiplier(2)->Range(100, 800)->Complexity();

void BM_RidgelessLimit(benchmark::State& state) {
  const VarianceProfile g = bench_profile(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ridgeless_test_risk(g, test_profile_columns(g), {1, 1}).risk);
  }
}
BENCHMARK(BM_RidgelessLimit)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_DeterministicRiskCurve(benchmark::State& state) {
  const VarianceProfile g = bench_profile(state);
  std::vector<double> grid;
  for (int k = 0; k < 50; ++k) grid.push_back(0.01 * std::pow(1e4, k / 49.0));
  for (auto _ : state) benchmark::DoNotOptimize(risk_curve(g, test_profile_columns(g), {1, 1}, grid).size());
}
BENCHMARK(BM_DeterministicRiskCurve)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SampleDesign(benchmark::State& state) {
  const VarianceProfile g = bench_profile(state);
  const EntryDist dist = state.range(1) ? EntryDist::Pareto : EntryDist::Gaussian;
  for (auto _ : state) benchmark::DoNotOptimize(sample_design(g, dist, 1).X.data());
  state.SetItemsProcessed(state.iterations() * g.n() * g.p());
}
BENCHMARK(BM_SampleDesign)->Args({400, 0})->Args({400, 1});

void BM_SpectralDecompose(benchmark::State& state) {
  const DesignMatrix d = sample_design(bench_profile(state), EntryDist::Gaussian, 1);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_decompose(d).eigenvalues.data());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SpectralDecompose)->RangeMultiplier(2)->Range(100, 800)->Unit(benchmark::kMillisecond)->Complexity();

void BM_EmpiricalRisk(benchmark::State& state) {
  const VarianceProfile g = bench_profile(state);
  const SpectralDecomposition dec = spectral_decompose(sample_design(g, EntryDist::Gaussian, 1));
  const TestProfile s = test_profile_columns(g);
  for (auto _ : state) benchmark::DoNotOptimize(emp_test_risk(dec, s, {1, 1}, 0.5).test_risk);
}
BENCHMARK(BM_EmpiricalRisk)->Arg(200)->Arg(800);

void BM_MonteCarlo(benchmark::State& state) {
  const VarianceProfile g = bench_profile(state);
  const DesignMatrix d = sample_design(g, EntryDist::Gaussian, 1);
  const TestProfile s = test_profile_columns(g);
  const int draws = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_test_risk(d, s, {1, 1}, 0.5, draws, 7).mean);
  state.SetItemsProcessed(state.iterations() * draws);
}
BENCHMARK(BM_MonteCarlo)->Args({200, 1024})->Args({200, 8192})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
