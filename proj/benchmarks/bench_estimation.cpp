#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "attkit/crossfit.hpp"
#include "attkit/estimators.hpp"
#include "attkit/sensitivity.hpp"
#include "attkit/sim.hpp"

using namespace attkit;

static void BM_InfluenceValues(benchmark::State& state) {
  const DiscreteDgp dgp = reference_dgp();
  const CausalDataset ds = generate(dgp, state.range(0), 5);
  const NuisanceSurface surface = true_nuisance_surface(dgp, ds);
  for (auto _ : state) {
    auto records = influence_values(ds, surface);
    benchmark::DoNotOptimize(records.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_InfluenceValues)->RangeMultiplier(4)->Range(4000, 256000);

static void BM_EstimateAtt(benchmark::State& state) {
  const DiscreteDgp dgp = reference_dgp();
  const CausalDataset ds = generate(dgp, state.range(0), 5);
  const auto records = influence_values(ds, true_nuisance_surface(dgp, ds));
  for (auto _ : state) {
    AttEstimate est = estimate_att(records);
    benchmark::DoNotOptimize(est);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateAtt)->RangeMultiplier(4)->Range(4000, 256000);

static void BM_SensitivityCurveDefaultGrid(benchmark::State& state) {
  const DiscreteDgp dgp = reference_dgp();
  const CausalDataset ds = generate(dgp, 50000, 5);
  const auto records = influence_values(ds, true_nuisance_surface(dgp, ds));
  const std::vector<double> grid = default_delta_grid();
  for (auto _ : state) {
    SensitivityCurve curve = sensitivity_curve(records, grid);
    benchmark::DoNotOptimize(curve.points.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.size()));
}
BENCHMARK(BM_SensitivityCurveDefaultGrid)->Unit(benchmark::kMillisecond);

static void BM_ChiSquaredTail(benchmark::State& state) {
  double x = 14.78;
  for (auto _ : state) {
    benchmark::DoNotOptimize(chi2_sf(x, 7));
    x += 1e-9;  // defeat constant folding across iterations
  }
}
BENCHMARK(BM_ChiSquaredTail);

static void BM_CrossfitLogistic(benchmark::State& state) {
  const DiscreteDgp dgp = reference_dgp();
  const CausalDataset ds = generate(dgp, state.range(0), 5);
  const FoldAssignment folds = assign_folds(ds.n(), 5, 1);
  for (auto _ : state) {
    NuisanceSurface surface = fit_nuisances(ds, LearnerSpec::logistic(), folds);
    benchmark::DoNotOptimize(surface.pi.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CrossfitLogistic)->Arg(20000)->Unit(benchmark::kMillisecond);
