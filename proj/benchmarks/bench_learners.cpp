#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "attkit/forest.hpp"
#include "attkit/logistic.hpp"
#include "attkit/rng.hpp"
#include "attkit/super_learner.hpp"

using namespace attkit;

namespace {

// Binary-outcome regression problem with a bit of signal in every column.
struct Problem {
  Eigen::MatrixXd x;
  Eigen::VectorXd t;
};

Problem make_problem(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  Rng rng(seed);
  Problem p;
  p.x.resize(n, d);
  p.t.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double eta = -0.3;
    for (Eigen::Index j = 0; j < d; ++j) {
      p.x(i, j) = 2.0 * rng.uniform() - 1.0;
      eta += 0.5 * p.x(i, j);
    }
    p.t[i] = rng.bernoulli(expit(eta)) ? 1.0 : 0.0;
  }
  return p;
}

}  // namespace

static void BM_LogisticFit(benchmark::State& state) {
  const Problem p = make_problem(state.range(0), 5, 7);
  for (auto _ : state) {
    auto model = fit_logistic(p.x, p.t, 1e-4);
    benchmark::DoNotOptimize(model);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogisticFit)->RangeMultiplier(4)->Range(1000, 64000);

static void BM_LogisticPredict(benchmark::State& state) {
  const Problem p = make_problem(16000, 5, 7);
  const auto model = fit_logistic(p.x, p.t, 1e-4);
  for (auto _ : state) {
    Eigen::VectorXd out = model->predict(p.x);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * 16000);
}
BENCHMARK(BM_LogisticPredict);

static void BM_ForestFit(benchmark::State& state) {
  const Problem p = make_problem(state.range(0), 5, 7);
  const LearnerSpec spec = LearnerSpec::random_forest(50, 6, 5);
  for (auto _ : state) {
    auto model = fit_random_forest(p.x, p.t, spec, TargetKind::Probability, 3);
    benchmark::DoNotOptimize(model);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForestFit)->RangeMultiplier(4)->Range(500, 8000)->Unit(benchmark::kMillisecond);

static void BM_ForestPredict(benchmark::State& state) {
  const Problem p = make_problem(4000, 5, 7);
  const LearnerSpec spec = LearnerSpec::random_forest(50, 6, 5);
  const auto model = fit_random_forest(p.x, p.t, spec, TargetKind::Probability, 3);
  for (auto _ : state) {
    Eigen::VectorXd out = model->predict(p.x);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * 4000);
}
BENCHMARK(BM_ForestPredict);

static void BM_SuperLearnerFit(benchmark::State& state) {
  const Problem p = make_problem(2000, 5, 7);
  const LearnerSpec spec = LearnerSpec::super_learner(
      {LearnerSpec::logistic(), LearnerSpec::random_forest(30, 5, 5)});
  for (auto _ : state) {
    auto model = fit_super_learner(p.x, p.t, spec, TargetKind::Probability, 11);
    benchmark::DoNotOptimize(model);
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_SuperLearnerFit)->Unit(benchmark::kMillisecond);
